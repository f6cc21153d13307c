#pragma once

// Unipotent wall-crossing factors, the twisted corrected cocycle, wall data,
// and a bounded search for correction triples.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "tropmirror/cocycle.hpp"
#include "tropmirror/local_system.hpp"

namespace tropmirror {

using FactorMap = std::map<Overlap, LaurentMatrix>;

/// Theta_10, Theta_21, Theta_02 with the printed coefficients, each in its
/// source chart's coordinates.
inline FactorMap standard_wall_factors(const Constants &k, const Atlas &atlas)
{
    auto cst = [&](std::size_t chart, const ParamMonomial &m) { return k.embed(m, atlas.chart(chart), 2); };
    FactorMap out;
    {
        const auto ctx = atlas.chart(0);
        auto m = LaurentMatrix::identity(ctx, 2);
        m(1, 0) = -(cst(0, k.a(0)) * cst(0, k.b(1)) * cst(0, k.a(2))) * LaurentPolynomial::parse(ctx, "w0_1^-1*w0_2");
        out[{1, 0}] = m;
    }
    {
        const auto ctx = atlas.chart(1);
        auto m = LaurentMatrix::identity(ctx, 2);
        m(1, 0) = -(cst(1, k.b(0)) * cst(1, k.b(1)) * cst(1, k.a(2))).inverse() *
                  LaurentPolynomial::parse(ctx, "w1_0*w1_2^-1");
        out[{2, 1}] = m;
    }
    {
        const auto ctx = atlas.chart(2);
        auto m = LaurentMatrix::identity(ctx, 2);
        m(1, 0) = (cst(2, k.a(0)) * cst(2, k.b(1)) * cst(2, k.b(2))).inverse() *
                  LaurentPolynomial::parse(ctx, "w2_0^-1*w2_1");
        out[{0, 2}] = m;
    }
    return out;
}

/// tau'_ij = tau_ij * Theta_ij; with a twisted local system the crossing
/// matrix K is applied after tau'_10 and K^-1 before tau'_02.
inline TransitionCocycle corrected_cocycle(const TransitionCocycle &base, const FactorMap &factors,
                                           const std::optional<LocalSystem> &twist)
{
    TransitionCocycle c(base.atlas(), base.frames(), "corrected " + base.name());
    for (const auto &[i, j] : base.overlaps()) {
        auto m = base.transition(i, j);
        if (const auto it = factors.find({i, j}); it != factors.end())
            m = m * it->second;
        if (twist) {
            if (const auto k = twist->insertion(base.atlas().chart(j))) {
                if (i == 1 && j == 0)
                    m = *k * m;
                else if (i == 0 && j == 2)
                    m = m * k->inverse();
            }
        }
        c.set(i, j, m);
    }
    return c;
}

inline LaurentMatrix twisted_corrected_defect(const TransitionCocycle &semiflat, const FactorMap &factors,
                                              const std::optional<LocalSystem> &twist)
{
    return cocycle_defect(corrected_cocycle(semiflat, factors, twist), standard_loop());
}

/// Torus exponent of the single off-diagonal monomial of a unipotent factor.
inline Covector correction_exponent(const LaurentMatrix &factor, const MonomialMap &to_torus)
{
    std::optional<Covector> m;
    for (std::size_t r = 0; r < factor.rows(); ++r)
        for (std::size_t s = 0; s < factor.cols(); ++s) {
            if (r == s || factor(r, s).is_zero())
                continue;
            const auto t = factor(r, s).substitute(to_torus);
            if (!t.is_monomial() || m)
                throw std::invalid_argument("factor is not a single-monomial unipotent");
            const auto &e = t.terms().begin()->first;
            m = Covector{e[0], e[1]};
        }
    if (!m)
        throw std::invalid_argument("factor has no off-diagonal entry");
    return *m;
}

struct WallDatum {
    Covector m;          // Fourier mode
    LatticeVector n;     // primitive tangent to ker m
    std::int64_t orientation = 0; // det(m, n)
};

/// n is the primitive vector along ker m with det(m, n) > 0.
inline WallDatum wall_data(const Covector &m)
{
    if (m.is_zero())
        throw std::invalid_argument("degenerate wall: zero Fourier mode");
    const auto n = primitive({-m.y, m.x});
    return {m, n, det2(m, n)};
}

// ---------------------------------------------------------------------------
// Bounded search for unipotent corrections.

enum class EliminationOutcome { Inconsistent, Solved, Undetermined };

struct EliminationResult {
    EliminationOutcome outcome = EliminationOutcome::Inconsistent;
    std::vector<std::optional<LaurentPolynomial>> values; // per unknown; nullopt = free
};

/// Solves polynomial equations for the given unknown slots by repeatedly
/// using an equation that is linear in one unknown with a unit coefficient
/// free of unknowns. Equations free of unknowns must vanish identically.
inline EliminationResult eliminate_unknowns(std::vector<LaurentPolynomial> eqs, const std::vector<std::size_t> &slots)
{
    EliminationResult res;
    res.values.assign(slots.size(), std::nullopt);
    auto has_unknown = [&](const LaurentPolynomial &p) {
        for (auto s : slots)
            if (p.involves(s))
                return true;
        return false;
    };
    for (;;) {
        std::vector<LaurentPolynomial> live;
        for (auto &e : eqs) {
            if (e.is_zero())
                continue;
            if (!has_unknown(e))
                return res; // inconsistent
            live.push_back(std::move(e));
        }
        eqs = std::move(live);
        if (eqs.empty()) {
            res.outcome = EliminationOutcome::Solved;
            return res;
        }
        bool progressed = false;
        for (std::size_t q = 0; q < eqs.size() && !progressed; ++q)
            for (std::size_t k = 0; k < slots.size() && !progressed; ++k) {
                const auto u = slots[k];
                if (!eqs[q].involves(u))
                    continue;
                const auto parts = eqs[q].split_by(u);
                if (parts.size() > 2 || !parts.count(1) || (parts.size() == 2 && !parts.count(0)))
                    continue;
                const auto &lead = parts.at(1);
                if (!lead.is_monomial() || has_unknown(lead))
                    continue;
                LaurentPolynomial rest(eqs[q].context());
                if (parts.count(0))
                    rest = parts.at(0);
                const auto value = -(rest * lead.inverse());
                for (auto &e : eqs)
                    e = e.substitute_variable(u, value);
                for (auto &v : res.values)
                    if (v)
                        v = v->substitute_variable(u, value);
                res.values[k] = value;
                progressed = true;
            }
        if (!progressed) {
            res.outcome = EliminationOutcome::Undetermined;
            return res;
        }
    }
}

struct CorrectionSolution {
    std::array<Overlap, 3> overlaps{};
    std::array<std::pair<int, int>, 3> chart_exponents{};
    std::array<Covector, 3> torus_exponents{};
    std::array<std::string, 3> coefficients; // canonical text; "free" for an undetermined scalar
    std::array<std::optional<LaurentPolynomial>, 3> values; // torus context of the cocycle's atlas
    bool complete() const
    {
        for (const auto &v : values)
            if (!v)
                return false;
        return true;
    }
};

struct UnipotentSearch {
    int bound = 0;
    std::size_t candidates = 0;
    std::size_t inconsistent = 0;
    std::size_t undetermined = 0;
    std::vector<CorrectionSolution> solutions;
};

/// Off-diagonal position (row, col) of the correction on each overlap.
using UnipotentPositions = std::map<Overlap, std::pair<std::size_t, std::size_t>>;

inline UnipotentPositions lower_triangular_positions()
{
    UnipotentPositions p;
    for (const auto &o : standard_overlaps())
        p[o] = {1, 0};
    return p;
}

/// Theta_ij = I + c w^e at the given position, e in chart-j coordinates.
inline LaurentMatrix unipotent_factor(const ContextPtr &ctx, std::pair<std::size_t, std::size_t> pos,
                                      std::pair<int, int> e, const LaurentPolynomial &c)
{
    auto m = LaurentMatrix::identity(ctx, 2);
    Exponent ex(ctx->size(), 0);
    ex[0] = e.first;
    ex[1] = e.second;
    m(pos.first, pos.second) = c * LaurentPolynomial::monomial(ctx, ex);
    return m;
}

/// Chart-j exponents in [-bound, bound]^2 whose monomial is regular on the
/// overlap with chart i.
inline std::vector<std::pair<int, int>> correction_candidates(const Atlas &atlas, const Overlap &o, int bound)
{
    const auto gens = atlas.overlap_test_generators(o.first, o.second);
    std::vector<std::pair<int, int>> out;
    for (int e0 = -bound; e0 <= bound; ++e0)
        for (int e1 = -bound; e1 <= bound; ++e1) {
            const auto m = atlas.torus_exponent(o.second, e0, e1);
            bool ok = true;
            for (const auto &g : gens)
                ok = ok && pairing(m, g) >= 0;
            if (ok)
                out.emplace_back(e0, e1);
        }
    return out;
}

/// Searches triples Theta_10, Theta_21, Theta_02 of the form I + c w^e with
/// unknown scalars c so that the (optionally twisted) loop product is I.
inline UnipotentSearch solve_unipotent_corrections(const TransitionCocycle &semiflat,
                                                   const std::optional<LocalSystem> &twist, int bound,
                                                   const UnipotentPositions &positions = lower_triangular_positions())
{
    if (bound < 1)
        throw std::invalid_argument("exponent bound must be at least 1");
    if (semiflat.rank() != 2)
        throw std::invalid_argument("the correction search is rank 2");
    const auto &base = semiflat.atlas();
    const Atlas ext = base.extended({"c10", "c21", "c02"});
    const auto n = ext.torus()->size();
    const std::vector<std::size_t> slots{n - 3, n - 2, n - 1};
    const auto &ovs = standard_overlaps();

    std::array<std::vector<std::pair<int, int>>, 3> cands;
    std::array<std::vector<LaurentMatrix>, 3> pieces;
    for (std::size_t k = 0; k < 3; ++k) {
        const auto [i, j] = ovs[k];
        const auto ctx = ext.chart(j);
        const auto tau = semiflat.transition(i, j).transform([&](const LaurentPolynomial &p) { return reslot(p, ctx); });
        const auto unknown = LaurentPolynomial::variable(ctx, slots[k]);
        std::optional<LaurentMatrix> ins;
        if (twist)
            ins = twist->insertion(ctx);
        cands[k] = correction_candidates(base, ovs[k], bound);
        for (const auto &e : cands[k]) {
            auto m = tau * unipotent_factor(ctx, positions.at(ovs[k]), e, unknown);
            if (ins && i == 1 && j == 0)
                m = *ins * m;
            if (ins && i == 0 && j == 2)
                m = m * ins->inverse();
            pieces[k].push_back(m.substitute(ext.to_torus(j)));
        }
    }

    UnipotentSearch out;
    out.bound = bound;
    const auto id = LaurentMatrix::identity(ext.torus(), 2);
    for (std::size_t z = 0; z < pieces[2].size(); ++z)
        for (std::size_t y = 0; y < pieces[1].size(); ++y) {
            const auto left = pieces[2][z] * pieces[1][y];
            for (std::size_t x = 0; x < pieces[0].size(); ++x) {
                ++out.candidates;
                const auto d = left * pieces[0][x] - id;
                std::map<std::tuple<std::size_t, int, int>, LaurentPolynomial> grouped;
                for (std::size_t r = 0; r < 2; ++r)
                    for (std::size_t s = 0; s < 2; ++s)
                        for (const auto &[e, c] : d(r, s).terms()) {
                            const auto key = std::make_tuple(r * 2 + s, e[0], e[1]);
                            auto stripped = e;
                            stripped[0] = stripped[1] = 0;
                            grouped.try_emplace(key, ext.torus()).first->second.add_term(stripped, c);
                        }
                std::vector<LaurentPolynomial> eqs;
                for (auto &[key, p] : grouped)
                    eqs.push_back(std::move(p));
                const auto res = eliminate_unknowns(std::move(eqs), slots);
                if (res.outcome == EliminationOutcome::Inconsistent) {
                    ++out.inconsistent;
                    continue;
                }
                if (res.outcome == EliminationOutcome::Undetermined) {
                    ++out.undetermined;
                    continue;
                }
                CorrectionSolution sol;
                const std::array<std::size_t, 3> pick{x, y, z};
                for (std::size_t k = 0; k < 3; ++k) {
                    sol.overlaps[k] = ovs[k];
                    sol.chart_exponents[k] = cands[k][pick[k]];
                    sol.torus_exponents[k] =
                        base.torus_exponent(ovs[k].second, cands[k][pick[k]].first, cands[k][pick[k]].second);
                    const auto &v = res.values[k];
                    bool refers_free = false;
                    if (v)
                        for (auto s : slots)
                            refers_free = refers_free || v->involves(s);
                    if (v && !refers_free) {
                        sol.values[k] = reslot(*v, base.torus());
                        sol.coefficients[k] = sol.values[k]->to_string();
                    } else {
                        sol.coefficients[k] = v ? v->to_string() : "free";
                    }
                }
                out.solutions.push_back(std::move(sol));
            }
        }
    return out;
}

/// Factors of a complete solution, in the source charts of `atlas`.
inline FactorMap solution_factors(const CorrectionSolution &sol, const Atlas &atlas,
                                  const UnipotentPositions &positions = lower_triangular_positions())
{
    if (!sol.complete())
        throw std::invalid_argument("solution has free coefficients");
    FactorMap out;
    for (std::size_t k = 0; k < 3; ++k) {
        const auto j = sol.overlaps[k].second;
        const auto c = reslot(*sol.values[k], atlas.chart(j));
        out[sol.overlaps[k]] = unipotent_factor(atlas.chart(j), positions.at(sol.overlaps[k]), sol.chart_exponents[k], c);
    }
    return out;
}

/// Scalar coefficient of a factor's off-diagonal monomial, in torus context.
inline LaurentPolynomial correction_coefficient(const LaurentMatrix &factor, const MonomialMap &to_torus)
{
    for (std::size_t r = 0; r < factor.rows(); ++r)
        for (std::size_t s = 0; s < factor.cols(); ++s) {
            if (r == s || factor(r, s).is_zero())
                continue;
            const auto t = factor(r, s).substitute(to_torus);
            const auto &[e, c] = *t.terms().begin();
            auto stripped = e;
            stripped[0] = stripped[1] = 0;
            return LaurentPolynomial::monomial(t.context(), stripped, c);
        }
    throw std::invalid_argument("factor has no off-diagonal entry");
}

} // namespace tropmirror
