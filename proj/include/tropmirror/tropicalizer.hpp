#pragma once

// Moment-polytope potentials for the projective plane, the hbar-family of
// Legendre transforms and the limits of the Fubini-Study connection entries.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "tropmirror/multisection.hpp"

namespace tropmirror {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct PolytopePoint {
    double x1 = 0;
    double x2 = 0;
    double x3() const { return 1.0 - x1 - x2; }
    bool interior() const { return x1 > 0 && x2 > 0 && x3() > 0; }
};

inline void require_interior(const PolytopePoint &x)
{
    if (!x.interior())
        throw DomainError("point (" + std::to_string(x.x1) + ", " + std::to_string(x.x2) +
                          ") is not in the open triangle");
}

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

struct Potentials {
    double gP, psi, psi1, psi2, g1, g2;
};

inline double g_P(const PolytopePoint &x)
{
    require_interior(x);
    const double x3 = x.x3();
    return 0.5 * (x.x1 * std::log(x.x1) + x.x2 * std::log(x.x2) + x3 * std::log(x3));
}

inline double psi(const PolytopePoint &x)
{
    return x.x1 * x.x1 + x.x2 * x.x2 + x.x1 * x.x2 - x.x1 - x.x2;
}

inline Potentials potentials(const PolytopePoint &x)
{
    require_interior(x);
    const double x3 = x.x3();
    return {g_P(x),
            psi(x),
            2 * x.x1 + x.x2 - 1,
            x.x1 + 2 * x.x2 - 1,
            0.5 * std::log(x.x1 / x3),
            0.5 * std::log(x.x2 / x3)};
}

inline void require_hbar(double hbar)
{
    if (!(hbar > 0) || !std::isfinite(hbar))
        throw std::invalid_argument("hbar must be positive");
}

/// xi_hbar = grad(g_P + psi / hbar).
inline Vec2 legendre_xi(const PolytopePoint &x, double hbar)
{
    require_hbar(hbar);
    const auto p = potentials(x);
    return {p.g1 + p.psi1 / hbar, p.g2 + p.psi2 / hbar};
}

/// Gradient of phi(xi) = 1/2 log(1 + e^{2 xi_1} + e^{2 xi_2}).
inline PolytopePoint legendre_x(const Vec2 &xi)
{
    const double a = 2 * xi[0], b = 2 * xi[1];
    const double m = std::max({0.0, a, b});
    const double e0 = std::exp(-m), e1 = std::exp(a - m), e2 = std::exp(b - m);
    const double s = e0 + e1 + e2;
    return {e1 / s, e2 / s};
}

/// log(e^a + e^b + e^c) without overflow.
inline double logsumexp3(double a, double b, double c)
{
    const double m = std::max({a, b, c});
    return m + std::log(std::exp(a - m) + std::exp(b - m) + std::exp(c - m));
}

inline double logaddexp(double a, double b)
{
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

struct EntryTriple {
    double E1 = 0, E2 = 0, E12 = 0;
    double max_abs() const { return std::max({std::abs(E1), std::abs(E2), std::abs(E12)}); }
};

inline EntryTriple entries_from_xi(const Vec2 &s)
{
    const double L = logsumexp3(0.0, 2 * s[0], 2 * s[1]);
    return {std::exp(2 * s[0] - L), std::exp(2 * s[1] - L), std::exp(s[0] + s[1] - L)};
}

inline EntryTriple connection_entries(const PolytopePoint &x, double hbar)
{
    return entries_from_xi(legendre_xi(x, hbar));
}

enum class Region { P0, P1, P2, Boundary };

inline std::string to_string(Region r)
{
    switch (r) {
    case Region::P0:
        return "P0";
    case Region::P1:
        return "P1";
    case Region::P2:
        return "P2";
    case Region::Boundary:
        return "boundary";
    }
    return "?";
}

inline Region region_classify(const PolytopePoint &x, double tol = 1e-9)
{
    const double p1 = 2 * x.x1 + x.x2 - 1;
    const double p2 = x.x1 + 2 * x.x2 - 1;
    const double d = x.x1 - x.x2;
    if (p1 < -tol && p2 < -tol)
        return Region::P0;
    if (p1 > tol && d > tol)
        return Region::P1;
    if (p2 > tol && d < -tol)
        return Region::P2;
    return Region::Boundary;
}

inline EntryTriple tropical_limit(Region r)
{
    switch (r) {
    case Region::P0:
        return {0, 0, 0};
    case Region::P1:
        return {1, 0, 0};
    case Region::P2:
        return {0, 1, 0};
    case Region::Boundary:
        break;
    }
    throw DomainError("no tropical limit on a region boundary");
}

/// |entries - limit| per component, evaluated without cancellation: the
/// complement 1 - E_i is itself a softmax weight.
inline EntryTriple entry_errors(const PolytopePoint &x, double hbar, Region r)
{
    const auto s = legendre_xi(x, hbar);
    const double L = logsumexp3(0.0, 2 * s[0], 2 * s[1]);
    const auto lim = tropical_limit(r);
    EntryTriple err;
    err.E1 = lim.E1 == 1 ? std::exp(logaddexp(0.0, 2 * s[1]) - L) : std::exp(2 * s[0] - L);
    err.E2 = lim.E2 == 1 ? std::exp(logaddexp(0.0, 2 * s[0]) - L) : std::exp(2 * s[1] - L);
    err.E12 = std::exp(s[0] + s[1] - L);
    return err;
}

/// Coefficients of d(check y)^1 and d(check y)^2 in the limiting connection.
struct TropicalConnection {
    Mat2 dy1{};
    Mat2 dy2{};
    bool operator==(const TropicalConnection &) const = default;
};

inline TropicalConnection tropical_connection(Region r)
{
    TropicalConnection c;
    switch (r) {
    case Region::P0:
        return c;
    case Region::P1:
        c.dy1 = {{{2, 0}, {0, 1}}};
        return c;
    case Region::P2:
        c.dy2 = {{{1, 0}, {0, 2}}};
        return c;
    case Region::Boundary:
        break;
    }
    throw DomainError("tropical connection undefined on a region boundary");
}

struct ConnectionMatrices {
    Mat2 dz1{};
    Mat2 dz2{};
};

/// Real-locus connection matrices of the Fubini-Study connection.
inline ConnectionMatrices assemble_connection(const PolytopePoint &x, double hbar)
{
    const auto e = connection_entries(x, hbar);
    return {{{{2 * e.E1, 0}, {e.E12, e.E1}}}, {{{e.E2, e.E12}, {0, 2 * e.E2}}}};
}

struct HessianReport {
    Mat2 hess_g{};
    Mat2 hess_psi{};
    Mat2 hess{};
    double minor1 = 0;
    double det = 0;
    double alpha = 0;
    bool positive_definite = false;
};

inline Mat2 hessian_gP(const PolytopePoint &x)
{
    require_interior(x);
    const double i3 = 1.0 / x.x3();
    return {{{0.5 * (1.0 / x.x1 + i3), 0.5 * i3}, {0.5 * i3, 0.5 * (1.0 / x.x2 + i3)}}};
}

inline Mat2 hessian_psi() { return {{{2, 1}, {1, 2}}}; }

inline HessianReport hessian_check(const PolytopePoint &x, double hbar)
{
    require_hbar(hbar);
    HessianReport r;
    r.hess_g = hessian_gP(x);
    r.hess_psi = hessian_psi();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r.hess[i][j] = r.hess_g[i][j] + r.hess_psi[i][j] / hbar;
    r.minor1 = r.hess[0][0];
    r.det = r.hess[0][0] * r.hess[1][1] - r.hess[0][1] * r.hess[1][0];
    r.positive_definite = r.minor1 > 0 && r.det > 0;
    r.alpha = 1.0 / (r.det * x.x1 * x.x2 * x.x3());
    return r;
}

// ---- grids -----------------------------------------------------------

using Polygon = std::vector<Vec2>;

/// Closed regions as quadrilaterals (counterclockwise).
inline Polygon region_polygon(Region r)
{
    const double t = 1.0 / 3.0;
    switch (r) {
    case Region::P0:
        return {{0, 0}, {0.5, 0}, {t, t}, {0, 0.5}};
    case Region::P1:
        return {{t, t}, {0.5, 0}, {1, 0}, {0.5, 0.5}};
    case Region::P2:
        return {{t, t}, {0.5, 0.5}, {0, 1}, {0, 0.5}};
    case Region::Boundary:
        break;
    }
    throw DomainError("boundary has no polygon");
}

/// Polygon with every edge moved inward by d (convex input).
inline Polygon inset_polygon(const Polygon &poly, double d)
{
    const std::size_t n = poly.size();
    Vec2 c{0, 0};
    for (const auto &p : poly) {
        c[0] += p[0] / n;
        c[1] += p[1] / n;
    }
    std::vector<std::pair<Vec2, Vec2>> lines; // point, direction
    for (std::size_t i = 0; i < n; ++i) {
        const auto &p = poly[i];
        const auto &q = poly[(i + 1) % n];
        const Vec2 t{q[0] - p[0], q[1] - p[1]};
        const double len = std::hypot(t[0], t[1]);
        Vec2 nrm{-t[1] / len, t[0] / len};
        if ((c[0] - p[0]) * nrm[0] + (c[1] - p[1]) * nrm[1] < 0)
            nrm = {-nrm[0], -nrm[1]};
        lines.push_back({{p[0] + d * nrm[0], p[1] + d * nrm[1]}, t});
    }
    Polygon out;
    for (std::size_t i = 0; i < n; ++i) {
        const auto &[p1, t1] = lines[(i + n - 1) % n];
        const auto &[p2, t2] = lines[i];
        // p1 + s t1 = p2 + u t2
        const double det = t1[0] * (-t2[1]) - (-t2[0]) * t1[1];
        const Vec2 rhs{p2[0] - p1[0], p2[1] - p1[1]};
        const double s = (rhs[0] * (-t2[1]) - (-t2[0]) * rhs[1]) / det;
        out.push_back({p1[0] + s * t1[0], p1[1] + s * t1[1]});
    }
    return out;
}

/// Bilinear image of params x params in a quadrilateral.
inline std::vector<PolytopePoint> quad_grid(const Polygon &q, const std::vector<double> &params)
{
    std::vector<PolytopePoint> out;
    for (double u : params)
        for (double v : params) {
            const double w0 = (1 - u) * (1 - v), w1 = u * (1 - v), w2 = u * v, w3 = (1 - u) * v;
            out.push_back({w0 * q[0][0] + w1 * q[1][0] + w2 * q[2][0] + w3 * q[3][0],
                           w0 * q[0][1] + w1 * q[1][1] + w2 * q[2][1] + w3 * q[3][1]});
        }
    return out;
}

/// n x n points of the open triangle: x1 = u, x2 = v (1 - u), u, v cell centres.
inline std::vector<PolytopePoint> triangle_grid(int n)
{
    std::vector<PolytopePoint> out;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double u = (i + 0.5) / n, v = (j + 0.5) / n;
            out.push_back({u, v * (1 - u)});
        }
    return out;
}

/// Points of triangle_grid(n) with every barycentric coordinate >= margin;
/// second differences stay accurate there.
inline std::vector<PolytopePoint> fd_sample_points(int n = 8, double margin = 0.1)
{
    std::vector<PolytopePoint> out;
    for (const auto &x : triangle_grid(n))
        if (std::min({x.x1, x.x2, x.x3()}) >= margin)
            out.push_back(x);
    return out;
}

/// 3 x 3 grid per region, each region inset by margin.
inline std::vector<PolytopePoint> default_region_grid(double margin = 0.05,
                                                      const std::vector<double> &params = {0.25, 0.5, 0.75})
{
    std::vector<PolytopePoint> out;
    for (auto r : {Region::P0, Region::P1, Region::P2}) {
        const auto pts = quad_grid(inset_polygon(region_polygon(r), margin), params);
        out.insert(out.end(), pts.begin(), pts.end());
    }
    return out;
}

// ---- sweeps ----------------------------------------------------------

struct SweepSample {
    double hbar;
    EntryTriple entries;
    EntryTriple errors;
    double error() const { return errors.max_abs(); }
};

struct SweepRow {
    PolytopePoint x;
    Region region = Region::Boundary;
    bool excluded = false;
    std::vector<SweepSample> samples;
    bool strictly_decreasing = false;
    double slope = 0; // least-squares d log(err) / d(1/hbar)
    bool within_tol = false;
};

struct SweepReport {
    std::vector<double> hbars;
    double tol = 0;
    std::vector<SweepRow> rows;

    std::size_t evaluated() const
    {
        return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto &r) { return !r.excluded; }));
    }
    bool all_pass() const
    {
        return std::all_of(rows.begin(), rows.end(), [](const SweepRow &r) {
            return r.excluded || (r.strictly_decreasing && r.slope < 0 && r.within_tol);
        });
    }
};

inline double fit_slope(const std::vector<double> &x, const std::vector<double> &y)
{
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline SweepReport convergence_sweep(const std::vector<PolytopePoint> &grid, const std::vector<double> &hbars,
                                     double tol, double boundary_tol = 1e-9)
{
    if (hbars.size() < 2)
        throw std::invalid_argument("need at least two hbar values");
    for (std::size_t i = 0; i < hbars.size(); ++i) {
        require_hbar(hbars[i]);
        if (i > 0 && !(hbars[i] < hbars[i - 1]))
            throw std::invalid_argument("hbar list must be strictly decreasing");
    }
    SweepReport rep{hbars, tol, {}};
    for (const auto &x : grid) {
        SweepRow row;
        row.x = x;
        require_interior(x);
        row.region = region_classify(x, boundary_tol);
        if (row.region == Region::Boundary) {
            row.excluded = true;
            rep.rows.push_back(row);
            continue;
        }
        std::vector<double> inv, logs;
        for (double h : hbars) {
            SweepSample s{h, connection_entries(x, h), entry_errors(x, h, row.region)};
            inv.push_back(1.0 / h);
            logs.push_back(std::log(std::max(s.error(), std::numeric_limits<double>::min())));
            row.samples.push_back(s);
        }
        row.strictly_decreasing = true;
        for (std::size_t i = 1; i < row.samples.size(); ++i)
            if (!(row.samples[i].error() < row.samples[i - 1].error()))
                row.strictly_decreasing = false;
        row.slope = fit_slope(inv, logs);
        row.within_tol = row.samples.back().error() <= tol;
        rep.rows.push_back(row);
    }
    return rep;
}

// ---- tropical limit of the potentials --------------------------------

struct PotentialLimitSample {
    double t;
    double value;
    double error;
};

struct PotentialLimitReport {
    int k = 0;
    Vec2 xi{};
    double limit = 0;
    std::vector<PotentialLimitSample> samples;
};

/// (k/2) log_t(1 + t^{2 xi_1} + t^{2 xi_2}) against max{0, k xi_1, k xi_2}.
inline PotentialLimitReport trop_potential_limit(int k, const Vec2 &xi, const std::vector<double> &ts)
{
    PotentialLimitReport rep{k, xi, std::max({0.0, k * xi[0], k * xi[1]}), {}};
    double prev = 1;
    for (double t : ts) {
        if (!(t > 1) || !(t > prev))
            throw std::invalid_argument("t values must be increasing and > 1");
        prev = t;
        const double lt = std::log(t);
        const double v = 0.5 * k * logsumexp3(0.0, 2 * xi[0] * lt, 2 * xi[1] * lt) / lt;
        rep.samples.push_back({t, v, std::abs(v - rep.limit)});
    }
    return rep;
}

// ---- connection read off a multi-section -----------------------------

/// Per base cone: diagonal matrices of the sheet slopes, sheets in label
/// order ('+' before '-').
inline std::vector<TropicalConnection> syz_connection_of_multisection(const TropicalMultiSection &ms)
{
    const auto rep = validate(ms);
    if (!rep.ok())
    {
        std::string why;
        for (const auto &f : rep.failures())
            why += " " + f.name;
        throw StructuralError("multi-section failed validation:" + why);
    }
    std::vector<TropicalConnection> out;
    for (std::size_t c = 0; c < ms.base.num_cones(); ++c) {
        const auto sheets = ms.sheets_over(c);
        if (sheets.size() != 2)
            throw StructuralError("connection read-off needs degree 2");
        TropicalConnection con;
        for (std::size_t s = 0; s < 2; ++s) {
            const auto &sl = ms.sheets[sheets[s]].slope;
            con.dy1[s][s] = static_cast<double>(sl.x);
            con.dy2[s][s] = static_cast<double>(sl.y);
        }
        out.push_back(con);
    }
    return out;
}

/// Interior cone of the fan (by index) containing xi, or -1 on a ray.
inline int cone_of_xi(const Vec2 &xi, double tol = 1e-12)
{
    // sigma_0 = <v1, v2> (xi <= 0 both), sigma_1 = <v0, v2>, sigma_2 = <v0, v1>
    const double a = xi[0], b = xi[1];
    if (a < -tol && b < -tol)
        return 0;
    if (a > tol && a - b > tol)
        return 1;
    if (b > tol && b - a > tol)
        return 2;
    return -1;
}

} // namespace tropmirror
