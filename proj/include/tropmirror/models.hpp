#pragma once

// The two rank-2 multi-sections over the projective plane's fan together
// with the chart frames used to glue their semi-flat bundles.

#include "tropmirror/cocycle.hpp"
#include "tropmirror/intertwiner.hpp"
#include "tropmirror/local_system.hpp"
#include "tropmirror/wall_crossing.hpp"

namespace tropmirror {

struct Model {
    Constants constants;
    Atlas atlas;
    TropicalMultiSection ms;
    SheetFrames frames;
    TransitionCocycle semiflat;
};

inline SheetFrames frames_by_label(const TropicalMultiSection &ms, const std::vector<std::vector<std::string>> &labels)
{
    SheetFrames f;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        f.emplace_back();
        for (const auto &l : labels[k])
            f.back().push_back(ms.sheet(k, l));
    }
    return f;
}

/// (0-, 0+), (1+, 1-), (2-, 2+): reproduces the diagonal 1<-0 and 2<-1
/// transitions with a_j on the weight-two summand.
inline SheetFrames L_frames(const TropicalMultiSection &ms)
{
    return frames_by_label(ms, {{"-", "+"}, {"+", "-"}, {"-", "+"}});
}

/// (01, 02), (12, 10), (20, 21): every pairing swaps the two positions.
inline SheetFrames Lprime_frames(const TropicalMultiSection &ms)
{
    return frames_by_label(ms, {{"01", "02"}, {"12", "10"}, {"20", "21"}});
}

inline Model make_model(TropicalMultiSection ms, SheetFrames frames, const Constants &constants)
{
    Atlas atlas(ms.base, constants.parameter_names());
    const auto pairings = pairings_from_gluings(ms, frames);
    auto semiflat = semiflat_cocycle(ms, frames, pairings, constants, atlas);
    return {constants, std::move(atlas), std::move(ms), std::move(frames), std::move(semiflat)};
}

inline Model model_L(const Constants &constants)
{
    auto ms = build_L();
    auto frames = L_frames(ms);
    return make_model(std::move(ms), std::move(frames), constants);
}

inline Model model_Lprime(const Constants &constants)
{
    auto ms = build_Lprime();
    auto frames = Lprime_frames(ms);
    return make_model(std::move(ms), std::move(frames), constants);
}

/// a_i = -1, b_i = 1: the constants under which the untwisted corrections
/// of the second multi-section exist.
inline Constants sign_constants() { return Constants::instantiated({-1, 1, -1, 1, -1, 1}); }

/// [[0, b0 b1 b2], [a0 a1 a2, 0]] in the torus context of `atlas`.
inline LaurentMatrix expected_naive_defect(const Constants &k, const Atlas &atlas)
{
    const auto ctx = atlas.torus();
    auto c = [&](const ParamMonomial &m) { return k.embed(m, ctx, 2); };
    LaurentMatrix d(ctx, 2, 2);
    d(0, 1) = c(k.b(0)) * c(k.b(1)) * c(k.b(2));
    d(1, 0) = c(k.a(0)) * c(k.a(1)) * c(k.a(2));
    return d;
}

} // namespace tropmirror
