#pragma once

// Chartwise isomorphisms between two cocycles: explicit candidates and a
// bounded linear search.

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "tropmirror/cocycle.hpp"
#include "tropmirror/linear_algebra.hpp"

namespace tropmirror {

using ChartMatrices = std::vector<LaurentMatrix>; // one per chart, chart coordinates

namespace detail {
inline ChartMatrices intertwiner_from_rows(const Constants &k, const Atlas &atlas, int sign_f1, int sign_f2)
{
    auto cst = [&](std::size_t chart, const ParamMonomial &m) { return k.embed(m, atlas.chart(chart), 2); };
    ChartMatrices f;
    {
        LaurentMatrix m(atlas.chart(0), 2, 2);
        m(0, 0) = LaurentPolynomial::constant(atlas.chart(0), 1);
        m(1, 1) = cst(0, k.a(0)) * cst(0, k.b(1)) * cst(0, k.a(2));
        f.push_back(m);
    }
    {
        LaurentMatrix m(atlas.chart(1), 2, 2);
        m(0, 1) = (cst(1, k.a(1)) * cst(1, k.b(2))).inverse();
        m(1, 0) = Rational(sign_f1) * cst(1, k.a(0));
        f.push_back(m);
    }
    {
        LaurentMatrix m(atlas.chart(2), 2, 2);
        m(0, 1) = -cst(2, k.b(2)).inverse();
        m(1, 0) = Rational(sign_f2) * (cst(2, k.a(0)) * cst(2, k.b(1)));
        f.push_back(m);
    }
    return f;
}
} // namespace detail

/// f_0 = diag(1, a0 b1 a2), f_1 = [[0, (a1 b2)^-1], [a0, 0]],
/// f_2 = [[0, -b2^-1], [a0 b1, 0]] as printed.
inline ChartMatrices printed_intertwiner(const Constants &k, const Atlas &atlas)
{
    return detail::intertwiner_from_rows(k, atlas, 1, 1);
}

/// Same with the (2,1) entries of f_1 and f_2 negated; this version
/// satisfies the intertwining relations.
inline ChartMatrices corrected_intertwiner(const Constants &k, const Atlas &atlas)
{
    return detail::intertwiner_from_rows(k, atlas, -1, -1);
}

/// Checks f_i a_ij = b_ij f_j on every overlap of b, and that every f_i is
/// invertible on its chart (determinant a nonzero constant).
inline ValidationReport check_intertwining(const TransitionCocycle &a, const TransitionCocycle &b, const ChartMatrices &f)
{
    ValidationReport rep;
    const auto &atlas = b.atlas();
    for (const auto &[i, j] : b.overlaps()) {
        const auto fi = f.at(i).substitute(atlas.to_torus(i));
        const auto fj = f.at(j).substitute(atlas.to_torus(j));
        const auto diff = fi * a.in_torus(i, j) - b.in_torus(i, j) * fj;
        rep.checks.push_back({"relation f" + std::to_string(i) + "*a" + overlap_name({i, j}) + " = b" +
                                  overlap_name({i, j}) + "*f" + std::to_string(j),
                              diff.is_zero(), diff.is_zero() ? "" : "residual " + diff.to_string()});
    }
    for (std::size_t k = 0; k < f.size(); ++k) {
        const auto d = f[k].determinant();
        bool constant = d.is_monomial();
        if (constant)
            constant = d.terms().begin()->first[0] == 0 && d.terms().begin()->first[1] == 0;
        rep.checks.push_back({"f" + std::to_string(k) + " invertible on U" + std::to_string(k), constant,
                              "det " + d.to_string()});
    }
    return rep;
}

struct IntertwinerSearch {
    enum class Status { Found, NoMorphism, NoInvertible, Undetermined };
    Status status = Status::NoMorphism;
    int bound = 0;
    std::size_t unknowns = 0;
    std::size_t equations = 0;
    std::vector<std::vector<Rational>> kernel; // coordinates in the monomial basis
    std::vector<ChartMatrices> basis;           // kernel vectors as chart matrices
    ChartMatrices solution;                     // invertible member, when found
    std::string detail;

    bool found() const { return status == Status::Found; }
};

inline std::string to_string(IntertwinerSearch::Status s)
{
    switch (s) {
    case IntertwinerSearch::Status::Found:
        return "found";
    case IntertwinerSearch::Status::NoMorphism:
        return "no nonzero morphism";
    case IntertwinerSearch::Status::NoInvertible:
        return "no invertible morphism";
    case IntertwinerSearch::Status::Undetermined:
        return "undetermined";
    }
    return "?";
}

namespace detail {
struct MonomialBasis {
    int bound;
    std::size_t rank;
    std::size_t per_chart() const { return rank * rank * per_entry(); }
    std::size_t per_entry() const { return static_cast<std::size_t>((bound + 1) * (bound + 1)); }
    std::size_t index(std::size_t chart, std::size_t r, std::size_t c, int e0, int e1) const
    {
        return chart * per_chart() + (r * rank + c) * per_entry() + static_cast<std::size_t>(e0 * (bound + 1) + e1);
    }
};

inline ChartMatrices vector_to_matrices(const std::vector<Rational> &v, const Atlas &atlas, const MonomialBasis &mb)
{
    ChartMatrices out;
    for (std::size_t k = 0; k < atlas.num_charts(); ++k) {
        const auto ctx = atlas.chart(k);
        LaurentMatrix m(ctx, mb.rank, mb.rank);
        for (std::size_t r = 0; r < mb.rank; ++r)
            for (std::size_t c = 0; c < mb.rank; ++c)
                for (int e0 = 0; e0 <= mb.bound; ++e0)
                    for (int e1 = 0; e1 <= mb.bound; ++e1) {
                        const auto &x = v[mb.index(k, r, c, e0, e1)];
                        if (x == 0)
                            continue;
                        Exponent e(ctx->size(), 0);
                        e[0] = e0;
                        e[1] = e1;
                        m(r, c).add_term(e, x);
                    }
        out.push_back(m);
    }
    return out;
}

inline bool is_nonzero_constant(const LaurentPolynomial &d)
{
    return d.is_monomial() && d.terms().begin()->first[0] == 0 && d.terms().begin()->first[1] == 0;
}
} // namespace detail

/// Finds chart matrices f_i with entries in span{w^e : e in [0,bound]^2}
/// (chart coordinates) such that f_i a_ij = b_ij f_j, then looks for an
/// invertible member of that linear space. Both cocycles must be
/// instantiated (no parameter slots).
inline IntertwinerSearch solve_intertwiner(const TransitionCocycle &a, const TransitionCocycle &b, int bound,
                                           std::uint64_t seed = 1)
{
    if (bound < 0)
        throw std::invalid_argument("exponent bound must be nonnegative");
    const auto &atlas = b.atlas();
    if (!atlas.extra().empty())
        throw std::invalid_argument("intertwiner search needs instantiated constants");
    if (a.rank() != b.rank())
        throw std::invalid_argument("cocycles have different ranks");
    const auto rank = b.rank();
    const detail::MonomialBasis mb{bound, rank};
    const auto n = mb.per_chart() * atlas.num_charts();

    IntertwinerSearch out;
    out.bound = bound;
    out.unknowns = n;

    std::map<std::tuple<std::size_t, std::size_t, std::size_t, std::int64_t, std::int64_t>, SparseRow> eqs;
    const auto ovs = b.overlaps();
    for (std::size_t o = 0; o < ovs.size(); ++o) {
        const auto [i, j] = ovs[o];
        const auto A = a.in_torus(i, j);
        const auto B = b.in_torus(i, j);
        auto add = [&](std::size_t r, std::size_t c, const LaurentPolynomial &p, const Covector &shift,
                       std::size_t var, const Rational &sign) {
            for (const auto &[e, coeff] : p.terms()) {
                auto &row = eqs[{o, r, c, e[0] + shift.x, e[1] + shift.y}];
                auto [it, ins] = row.try_emplace(var, 0);
                it->second += sign * coeff;
                if (it->second == 0)
                    row.erase(it);
            }
        };
        for (int e0 = 0; e0 <= bound; ++e0)
            for (int e1 = 0; e1 <= bound; ++e1)
                for (std::size_t r = 0; r < rank; ++r)
                    for (std::size_t c = 0; c < rank; ++c)
                        for (std::size_t k = 0; k < rank; ++k) {
                            // f_i(r,k) a(k,c)
                            add(r, c, A(k, c), atlas.torus_exponent(i, e0, e1), mb.index(i, r, k, e0, e1), 1);
                            // - b(r,k) f_j(k,c)
                            add(r, c, B(r, k), atlas.torus_exponent(j, e0, e1), mb.index(j, k, c, e0, e1), -1);
                        }
    }
    std::vector<SparseRow> rows;
    for (auto &[key, row] : eqs)
        if (!row.empty())
            rows.push_back(std::move(row));
    out.equations = rows.size();
    out.kernel = rational_nullspace(std::move(rows), n);
    for (const auto &v : out.kernel)
        out.basis.push_back(detail::vector_to_matrices(v, atlas, mb));

    const auto d = out.kernel.size();
    if (d == 0) {
        out.status = IntertwinerSearch::Status::NoMorphism;
        out.detail = "only the zero morphism within the bound";
        return out;
    }

    // det f_i(t) for the general member t_1 F_1 + ... + t_d F_d
    for (std::size_t k = 0; k < atlas.num_charts(); ++k) {
        auto names = atlas.chart(k)->names();
        for (std::size_t q = 0; q < d; ++q)
            names.push_back("t" + std::to_string(q));
        const auto ctx = make_context(names);
        LaurentMatrix general(ctx, rank, rank);
        for (std::size_t q = 0; q < d; ++q) {
            const auto t = LaurentPolynomial::variable(ctx, atlas.chart(k)->size() + q);
            for (std::size_t r = 0; r < rank; ++r)
                for (std::size_t c = 0; c < rank; ++c)
                    general(r, c) += reslot(out.basis[q][k](r, c), ctx) * t;
        }
        if (general.determinant().is_zero()) {
            out.status = IntertwinerSearch::Status::NoInvertible;
            out.detail = "determinant vanishes identically on chart " + std::to_string(k) + " (kernel dimension " +
                         std::to_string(d) + ")";
            return out;
        }
    }

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(-5, 5);
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<Rational> v(n, 0);
        for (std::size_t q = 0; q < d; ++q) {
            const Rational t = (d == 1 || attempt == 0) ? Rational(q == 0 ? 1 : 0) : Rational(pick(rng));
            if (t == 0)
                continue;
            for (std::size_t x = 0; x < n; ++x)
                v[x] += t * out.kernel[q][x];
        }
        auto f = detail::vector_to_matrices(v, atlas, mb);
        bool ok = true;
        for (const auto &m : f)
            ok = ok && detail::is_nonzero_constant(m.determinant());
        if (ok) {
            out.status = IntertwinerSearch::Status::Found;
            out.solution = std::move(f);
            out.detail = "kernel dimension " + std::to_string(d);
            return out;
        }
        if (d == 1)
            break;
    }
    out.status = IntertwinerSearch::Status::Undetermined;
    out.detail = "no sampled member of the kernel was invertible";
    return out;
}

/// True when f (chart coordinates, entries inside the search box) lies in
/// the span of the search's kernel.
inline bool in_kernel_span(const IntertwinerSearch &s, const ChartMatrices &f)
{
    if (s.kernel.empty())
        return false;
    const auto rank = f.front().rows();
    const detail::MonomialBasis mb{s.bound, rank};
    std::vector<Rational> v(s.unknowns, 0);
    for (std::size_t k = 0; k < f.size(); ++k)
        for (std::size_t r = 0; r < rank; ++r)
            for (std::size_t c = 0; c < rank; ++c)
                for (const auto &[e, coeff] : f[k](r, c).terms()) {
                    if (e[0] < 0 || e[1] < 0 || e[0] > s.bound || e[1] > s.bound)
                        return false;
                    v[mb.index(k, r, c, e[0], e[1])] = coeff;
                }
    auto rows = s.kernel;
    const auto before = rational_rank(rows);
    rows.push_back(v);
    return rational_rank(rows) == before;
}

} // namespace tropmirror
