#pragma once

// Transition cocycles on the toric atlas: reference tangent data, semi-flat
// data from multi-sections, line bundles, and the checks run on all of them.

#include <algorithm>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tropmirror/atlas.hpp"
#include "tropmirror/laurent_matrix.hpp"
#include "tropmirror/multisection.hpp"
#include "tropmirror/parameters.hpp"

namespace tropmirror {

/// Ordered basis over one chart; weights are torus characters.
struct ChartFrame {
    std::size_t chart = 0;
    std::vector<std::string> labels;
    std::vector<Covector> weights;
};

using Overlap = std::pair<std::size_t, std::size_t>; // (i, j): chart j frame -> chart i frame

/// The three overlaps (1<-0), (2<-1), (0<-2) of the cyclic loop 0,1,2,0.
inline const std::vector<Overlap> &standard_overlaps()
{
    static const std::vector<Overlap> o{{1, 0}, {2, 1}, {0, 2}};
    return o;
}

inline std::string overlap_name(const Overlap &o) { return std::to_string(o.first) + std::to_string(o.second); }

class TransitionCocycle {
public:
    TransitionCocycle() = default;
    TransitionCocycle(Atlas atlas, std::vector<ChartFrame> frames, std::string name = {})
        : atlas_(std::move(atlas)), frames_(std::move(frames)), name_(std::move(name))
    {
        if (frames_.size() != atlas_.num_charts())
            throw std::invalid_argument("one frame per chart is required");
        for (const auto &f : frames_) {
            if (f.labels.size() != f.weights.size())
                throw std::invalid_argument("frame labels and weights differ in length");
            if (f.labels.size() != frames_.front().labels.size())
                throw std::invalid_argument("frames have different ranks");
        }
    }

    const Atlas &atlas() const { return atlas_; }
    const std::string &name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }
    std::size_t rank() const { return frames_.empty() ? 0 : frames_.front().labels.size(); }
    const ChartFrame &frame(std::size_t k) const { return frames_.at(k); }
    const std::vector<ChartFrame> &frames() const { return frames_; }

    /// Stores the (i <- j) transition, written in chart-j coordinates.
    void set(std::size_t i, std::size_t j, LaurentMatrix m)
    {
        if (!same_context(m.context(), atlas_.chart(j)))
            throw ContextError("transition " + std::to_string(i) + "<-" + std::to_string(j) +
                               " is not written in chart " + std::to_string(j) + " coordinates");
        if (m.rows() != rank() || m.cols() != rank())
            throw std::invalid_argument("transition size does not match the frames");
        transitions_[{i, j}] = std::move(m);
    }

    bool has(std::size_t i, std::size_t j) const { return transitions_.count({i, j}) > 0; }
    const LaurentMatrix &transition(std::size_t i, std::size_t j) const
    {
        const auto it = transitions_.find({i, j});
        if (it == transitions_.end())
            throw std::out_of_range("no transition " + std::to_string(i) + "<-" + std::to_string(j));
        return it->second;
    }
    std::vector<Overlap> overlaps() const
    {
        std::vector<Overlap> out;
        for (const auto &[k, v] : transitions_)
            out.push_back(k);
        return out;
    }

    /// (i <- j) in torus coordinates; falls back to inverting (j <- i).
    LaurentMatrix in_torus(std::size_t i, std::size_t j) const
    {
        if (i == j)
            return LaurentMatrix::identity(atlas_.torus(), rank());
        if (has(i, j))
            return transition(i, j).substitute(atlas_.to_torus(j));
        if (has(j, i))
            return transition(j, i).substitute(atlas_.to_torus(i)).inverse();
        throw std::out_of_range("no transition between charts " + std::to_string(i) + " and " + std::to_string(j));
    }

    nlohmann::json to_json() const
    {
        nlohmann::json j;
        j["name"] = name_;
        j["rank"] = rank();
        j["frames"] = nlohmann::json::array();
        for (const auto &f : frames_) {
            nlohmann::json w = nlohmann::json::array();
            for (const auto &c : f.weights)
                w.push_back({c.x, c.y});
            j["frames"].push_back({{"chart", f.chart}, {"labels", f.labels}, {"weights", w}});
        }
        j["transitions"] = nlohmann::json::object();
        for (const auto &[k, m] : transitions_)
            j["transitions"][overlap_name(k)] = m.to_json();
        return j;
    }

private:
    Atlas atlas_;
    std::vector<ChartFrame> frames_;
    std::map<Overlap, LaurentMatrix> transitions_;
    std::string name_;
};

/// Frames whose weights are the chart variables' torus exponents (the
/// coordinate vector fields d/dw carry the weight of w).
inline std::vector<ChartFrame> tangent_frames(const Atlas &atlas)
{
    std::vector<ChartFrame> frames;
    for (std::size_t k = 0; k < atlas.num_charts(); ++k) {
        const auto &names = atlas.chart(k)->names();
        frames.push_back({k,
                          {"d/d" + names[0], "d/d" + names[1]},
                          {atlas.variable_exponent(k, 0), atlas.variable_exponent(k, 1)}});
    }
    return frames;
}

/// The tangent transition matrices of the projective plane, as printed.
inline TransitionCocycle reference_tangent_cocycle(const Atlas &atlas = Atlas())
{
    TransitionCocycle c(atlas, tangent_frames(atlas), "tangent");
    c.set(1, 0, LaurentMatrix::parse(atlas.chart(0), {{"-w0_1^-2", "0"}, {"-w0_1^-2*w0_2", "w0_1^-1"}}));
    c.set(2, 1, LaurentMatrix::parse(atlas.chart(1), {{"w1_2^-1", "-w1_0*w1_2^-2"}, {"0", "-w1_2^-2"}}));
    c.set(0, 2, LaurentMatrix::parse(atlas.chart(2), {{"-w2_0^-2*w2_1", "w2_0^-1"}, {"-w2_0^-2", "0"}}));
    return c;
}

/// Jacobian d(chart i coords)/d(chart j coords), computed from the monomial
/// chart relations alone.
inline TransitionCocycle jacobian_cocycle(const Atlas &atlas, const std::vector<Overlap> &overlaps = standard_overlaps())
{
    TransitionCocycle c(atlas, tangent_frames(atlas), "jacobian");
    for (const auto &[i, j] : overlaps) {
        const auto ctx = atlas.chart(j);
        LaurentMatrix m(ctx, 2, 2);
        for (std::size_t r = 0; r < 2; ++r) {
            const auto [e0, e1] = atlas.chart_exponent(j, atlas.variable_exponent(i, r));
            for (std::size_t s = 0; s < 2; ++s) {
                Exponent e(ctx->size(), 0);
                e[0] = e0;
                e[1] = e1;
                const int k = e[s];
                if (k == 0)
                    continue;
                e[s] -= 1;
                m(r, s) = LaurentPolynomial::monomial(ctx, e, k);
            }
        }
        c.set(i, j, m);
    }
    return c;
}

/// Product of transitions around a loop of charts, in torus coordinates.
inline LaurentMatrix cocycle_defect(const TransitionCocycle &c, const std::vector<std::size_t> &loop)
{
    auto product = LaurentMatrix::identity(c.atlas().torus(), c.rank());
    for (std::size_t k = 0; k + 1 < loop.size(); ++k)
        if (loop[k] != loop[k + 1])
            product = c.in_torus(loop[k + 1], loop[k]) * product;
    return product;
}

inline const std::vector<std::size_t> &standard_loop()
{
    static const std::vector<std::size_t> l{0, 1, 2, 0};
    return l;
}

/// Every monomial in entry (s', s) of (i <- j) must have torus exponent
/// weight_i(s') - weight_j(s).
inline ValidationReport equivariance_check(const TransitionCocycle &c)
{
    ValidationReport rep;
    for (const auto &[i, j] : c.overlaps()) {
        const auto t = c.in_torus(i, j);
        for (std::size_t r = 0; r < c.rank(); ++r)
            for (std::size_t s = 0; s < c.rank(); ++s) {
                if (t(r, s).is_zero())
                    continue;
                const auto expected = c.frame(i).weights[r] - c.frame(j).weights[s];
                CheckResult chk{"equivariance " + overlap_name({i, j}) + " entry (" + std::to_string(r + 1) + "," +
                                    std::to_string(s + 1) + ")",
                                true,
                                "expected exponent " + expected.str()};
                for (const auto &[e, coeff] : t(r, s).terms()) {
                    const Covector got{e[0], e[1]};
                    if (got != expected) {
                        chk.pass = false;
                        chk.detail = "exponent " + got.str() + " != " + expected.str();
                    }
                }
                rep.checks.push_back(chk);
            }
    }
    return rep;
}

/// Determinant is a unit and all entries of each transition and its
/// inverse are regular on the overlap.
inline ValidationReport regularity_check(const TransitionCocycle &c)
{
    ValidationReport rep;
    for (const auto &[i, j] : c.overlaps()) {
        const auto gens = c.atlas().overlap_test_generators(i, j);
        const auto t = c.in_torus(i, j);
        const auto det = t.determinant();
        CheckResult unit{"unit determinant " + overlap_name({i, j}), det.is_monomial(), det.to_string()};
        rep.checks.push_back(unit);
        if (!unit.pass)
            continue;
        const auto inv = t.inverse();
        bool ok = true;
        std::string bad;
        for (std::size_t r = 0; r < c.rank(); ++r)
            for (std::size_t s = 0; s < c.rank(); ++s)
                for (const auto *m : {&t, &inv})
                    if (!is_regular_on_cone((*m)(r, s), gens)) {
                        ok = false;
                        bad = (*m)(r, s).to_string();
                    }
        rep.checks.push_back({"regular on overlap " + overlap_name({i, j}), ok, ok ? "" : "irregular entry " + bad});
    }
    return rep;
}

/// Sheet indices forming each chart's frame, in order.
using SheetFrames = std::vector<std::vector<std::size_t>>;
/// For overlap (i, j): position of chart-j frame vector s in chart i's frame.
using Pairings = std::map<Overlap, std::vector<std::size_t>>;

/// Pairings forced by the gluing table of the multi-section.
inline Pairings pairings_from_gluings(const TropicalMultiSection &ms, const SheetFrames &frames,
                                      const std::vector<Overlap> &overlaps = standard_overlaps())
{
    Pairings p;
    for (const auto &[i, j] : overlaps) {
        const auto ray = ms.base.shared_ray(i, j);
        if (!ray)
            throw StructuralError("charts do not overlap");
        std::vector<std::size_t> perm;
        for (auto s : frames.at(j)) {
            const auto other = ms.partner(s, *ray);
            const auto &fi = frames.at(i);
            const auto it = other ? std::find(fi.begin(), fi.end(), *other) : fi.end();
            if (it == fi.end())
                throw StructuralError("sheet " + ms.sheet_name(s) + " has no partner in chart " + std::to_string(i));
            perm.push_back(static_cast<std::size_t>(it - fi.begin()));
        }
        p[{i, j}] = perm;
    }
    return p;
}

inline std::vector<ChartFrame> sheet_frames(const TropicalMultiSection &ms, const SheetFrames &frames)
{
    std::vector<ChartFrame> out;
    for (std::size_t k = 0; k < frames.size(); ++k) {
        ChartFrame f{k, {}, {}};
        for (auto s : frames[k]) {
            if (ms.sheets.at(s).base_cone != k)
                throw StructuralError("frame of chart " + std::to_string(k) + " uses a sheet over another cone");
            f.labels.push_back(ms.sheets[s].label);
            f.weights.push_back(-ms.sheets[s].slope);
        }
        out.push_back(f);
    }
    return out;
}

/// Entry (s', s) of (i <- j) is c * w^{-(m_s' - m_s)}, with c = a_j for
/// source position 0 and b_j for source position 1.
inline TransitionCocycle semiflat_cocycle(const TropicalMultiSection &ms, const SheetFrames &frames,
                                          const Pairings &pairings, const Constants &constants, const Atlas &atlas)
{
    if (atlas.extra().size() < constants.parameter_names().size() ||
        !std::equal(constants.parameter_names().begin(), constants.parameter_names().end(), atlas.extra().begin()))
        throw ContextError("atlas does not carry the parameter variables");
    TransitionCocycle c(atlas, sheet_frames(ms, frames), "semi-flat");
    const auto r = c.rank();
    if (r != 2)
        throw StructuralError("semi-flat constants are defined for rank 2");
    for (const auto &[ov, perm] : pairings) {
        const auto [i, j] = ov;
        if (perm.size() != r)
            throw StructuralError("pairing " + overlap_name(ov) + " has the wrong size");
        auto sorted = perm;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t k = 0; k < r; ++k)
            if (sorted[k] != k)
                throw StructuralError("pairing " + overlap_name(ov) + " is not a bijection");
        const auto ray = ms.base.shared_ray(i, j);
        if (!ray)
            throw StructuralError("charts " + overlap_name(ov) + " do not overlap");
        LaurentMatrix m(atlas.chart(j), r, r);
        for (std::size_t s = 0; s < r; ++s) {
            const auto src = frames[j][s];
            const auto dst = frames[i][perm[s]];
            if (!ms.glued(src, dst, *ray))
                throw StructuralError("pairing " + overlap_name(ov) + " matches sheets that are not glued");
            const auto &pm = s == 0 ? constants.a(j) : constants.b(j);
            const auto coeff = constants.embed(pm, atlas.chart(j), 2);
            m(perm[s], s) = atlas.character(j, -(ms.sheets[dst].slope - ms.sheets[src].slope), coeff);
        }
        c.set(i, j, m);
    }
    return c;
}

/// g_ij = w^{-(m_i - m_j)} for a PL function with slopes m_k.
inline TransitionCocycle line_bundle_cocycle(const PLFunction &f, const Atlas &atlas,
                                             const std::vector<Overlap> &overlaps = standard_overlaps())
{
    std::vector<ChartFrame> frames;
    for (std::size_t k = 0; k < atlas.num_charts(); ++k)
        frames.push_back({k, {"e" + std::to_string(k)}, {-f.slopes.at(k)}});
    TransitionCocycle c(atlas, frames, "line bundle");
    for (const auto &[i, j] : overlaps) {
        LaurentMatrix m(atlas.chart(j), 1, 1);
        m(0, 0) = atlas.character(j, -(f.slopes[i] - f.slopes[j]), LaurentPolynomial::constant(atlas.chart(j), 1));
        c.set(i, j, m);
    }
    return c;
}

inline TransitionCocycle direct_sum(const TransitionCocycle &a, const TransitionCocycle &b)
{
    std::vector<ChartFrame> frames;
    for (std::size_t k = 0; k < a.frames().size(); ++k) {
        auto f = a.frame(k);
        f.labels.insert(f.labels.end(), b.frame(k).labels.begin(), b.frame(k).labels.end());
        f.weights.insert(f.weights.end(), b.frame(k).weights.begin(), b.frame(k).weights.end());
        frames.push_back(f);
    }
    TransitionCocycle c(a.atlas(), frames, a.name() + "+" + b.name());
    const auto ra = a.rank(), rb = b.rank();
    for (const auto &[i, j] : a.overlaps()) {
        LaurentMatrix m(a.atlas().chart(j), ra + rb, ra + rb);
        const auto &x = a.transition(i, j);
        const auto &y = b.transition(i, j);
        for (std::size_t r = 0; r < ra; ++r)
            for (std::size_t s = 0; s < ra; ++s)
                m(r, s) = x(r, s);
        for (std::size_t r = 0; r < rb; ++r)
            for (std::size_t s = 0; s < rb; ++s)
                m(ra + r, ra + s) = y(r, s);
        c.set(i, j, m);
    }
    return c;
}

/// Rank-1 cocycle of determinants.
inline TransitionCocycle determinant_cocycle(const TransitionCocycle &c)
{
    std::vector<ChartFrame> frames;
    for (const auto &f : c.frames()) {
        Covector w;
        for (const auto &x : f.weights)
            w = w + x;
        frames.push_back({f.chart, {"det"}, {w}});
    }
    TransitionCocycle d(c.atlas(), frames, "det " + c.name());
    for (const auto &[i, j] : c.overlaps()) {
        LaurentMatrix m(c.atlas().chart(j), 1, 1);
        m(0, 0) = c.transition(i, j).determinant();
        d.set(i, j, m);
    }
    return d;
}

struct DeterminantComparison {
    std::vector<LaurentPolynomial> ratios; // det c_ij / g_ij, per overlap, torus context
    bool ratios_constant = true;           // no dependence on the torus variables
    LaurentPolynomial loop_product;        // product of the ratios around the loop
};

/// Compares det(c) against a line bundle cocycle overlap by overlap.
inline DeterminantComparison compare_determinant(const TransitionCocycle &c, const TransitionCocycle &line)
{
    DeterminantComparison out;
    const auto d = determinant_cocycle(c);
    out.loop_product = LaurentPolynomial::constant(c.atlas().torus(), 1);
    for (const auto &[i, j] : c.overlaps()) {
        const auto ratio = d.in_torus(i, j)(0, 0) * line.in_torus(i, j)(0, 0).inverse();
        for (const auto &[e, coeff] : ratio.terms())
            if (e[0] != 0 || e[1] != 0)
                out.ratios_constant = false;
        out.ratios.push_back(ratio);
        out.loop_product = out.loop_product * ratio;
    }
    return out;
}

/// Replaces the parameter slots (from offset 2 on) by rational values and
/// drops them, landing in `target` (which has only the two w slots plus any
/// slots beyond the parameters).
inline LaurentPolynomial specialize(const LaurentPolynomial &p, const std::vector<Rational> &values,
                                    const ContextPtr &target)
{
    LaurentPolynomial r(target);
    const auto np = values.size();
    for (const auto &[e, c] : p.terms()) {
        Rational coeff = c;
        for (std::size_t k = 0; k < np; ++k) {
            const int x = e[2 + k];
            for (int n = 0; n < (x < 0 ? -x : x); ++n)
                coeff = x < 0 ? coeff / values[k] : coeff * values[k];
        }
        Exponent ne(target->size(), 0);
        ne[0] = e[0];
        ne[1] = e[1];
        for (std::size_t k = 2 + np; k < e.size(); ++k)
            ne.at(k - np) = e[k];
        r.add_term(ne, coeff);
    }
    return r;
}

inline LaurentMatrix specialize(const LaurentMatrix &m, const std::vector<Rational> &values, const ContextPtr &target)
{
    LaurentMatrix r(target, m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            r(i, j) = specialize(m(i, j), values, target);
    return r;
}

} // namespace tropmirror
