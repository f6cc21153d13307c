#pragma once

// Central differences, used to validate hand-derived derivatives.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

namespace tropmirror::fd {

using Fn2 = std::function<double(double, double)>;

inline std::array<double, 2> gradient(const Fn2 &f, double x, double y, double h = 1e-6)
{
    return {(f(x + h, y) - f(x - h, y)) / (2 * h), (f(x, y + h) - f(x, y - h)) / (2 * h)};
}

/// Second differences of f itself (no analytic gradient involved).
inline std::array<std::array<double, 2>, 2> hessian(const Fn2 &f, double x, double y, double h = 1e-4)
{
    const double fxx = (f(x + h, y) - 2 * f(x, y) + f(x - h, y)) / (h * h);
    const double fyy = (f(x, y + h) - 2 * f(x, y) + f(x, y - h)) / (h * h);
    const double fxy = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4 * h * h);
    return {{{fxx, fxy}, {fxy, fyy}}};
}

/// |a - b| / max(|b|, floor); the floor keeps near-zero values from
/// dominating.
inline double rel_error(double a, double b, double floor = 1e-3)
{
    return std::abs(a - b) / std::max(std::abs(b), floor);
}

} // namespace tropmirror::fd
