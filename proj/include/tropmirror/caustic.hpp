#pragma once

// Local model of a simple branch point: the potential 4/3 r^{3/2} cos(3t/2)
// on the double cover, its gradient flow and the flow lines leaving the
// origin. Angles live on the cover, t in [0, 4 pi); reported mod 2 pi.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace tropmirror {

struct PolarPoint {
    double r = 0;
    double theta = 0;
};

class SingularPointError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

inline double f_caustic(const PolarPoint &p)
{
    return 4.0 / 3.0 * std::pow(p.r, 1.5) * std::cos(1.5 * p.theta);
}

/// Gradient for the metric dr^2 + r^2 dtheta^2, as (rdot, thetadot).
inline PolarPoint grad_caustic(const PolarPoint &p)
{
    if (!(p.r > 0))
        throw SingularPointError("gradient is singular at the origin");
    const double s = std::sqrt(p.r);
    return {2 * s * std::cos(1.5 * p.theta), -2 / s * std::sin(1.5 * p.theta)};
}

/// Q = r^{3/2} sin(3 theta / 2), constant along flow lines.
inline double first_integral(const PolarPoint &p)
{
    if (!(p.r > 0))
        throw SingularPointError("first integral needs r > 0");
    return std::pow(p.r, 1.5) * std::sin(1.5 * p.theta);
}

inline double wrap_angle(double theta, double period = 2 * std::numbers::pi)
{
    double t = std::fmod(theta, period);
    if (t < 0)
        t += period;
    return t;
}

/// Distance between two angles modulo 2 pi.
inline double angle_distance(double a, double b)
{
    const double d = wrap_angle(a - b);
    return std::min(d, 2 * std::numbers::pi - d);
}

struct FlowSample {
    double t;
    PolarPoint p;
};

struct FlowOptions {
    double r_min = 1e-8;
    double r_max = 10;
    bool backward = false;
};

struct FlowPath {
    std::vector<FlowSample> samples;
    double step = 0;
    std::string integrator = "rk4";
    std::string stop_reason;

    const PolarPoint &last() const { return samples.back().p; }
};

/// Classical fixed-step RK4 on (r, theta).
inline FlowPath integrate_flow(const PolarPoint &start, double step, std::size_t max_steps, FlowOptions opt = {})
{
    if (!(step > 0))
        throw std::invalid_argument("step must be positive");
    if (!(start.r > 0))
        throw SingularPointError("flow must start away from the origin");
    const double sign = opt.backward ? -1.0 : 1.0;
    auto field = [&](const PolarPoint &p) {
        if (!(p.r > 0))
            return PolarPoint{0, 0};
        const auto g = grad_caustic(p);
        return PolarPoint{sign * g.r, sign * g.theta};
    };
    FlowPath path;
    path.step = step;
    PolarPoint p = start;
    double t = 0;
    path.samples.push_back({t, p});
    for (std::size_t n = 0; n < max_steps; ++n) {
        const auto k1 = field(p);
        const auto k2 = field({p.r + 0.5 * step * k1.r, p.theta + 0.5 * step * k1.theta});
        const auto k3 = field({p.r + 0.5 * step * k2.r, p.theta + 0.5 * step * k2.theta});
        const auto k4 = field({p.r + step * k3.r, p.theta + step * k3.theta});
        p.r += step / 6 * (k1.r + 2 * k2.r + 2 * k3.r + k4.r);
        p.theta += step / 6 * (k1.theta + 2 * k2.theta + 2 * k3.theta + k4.theta);
        t += step;
        path.samples.push_back({t, p});
        if (!(p.r >= opt.r_min)) {
            path.stop_reason = "r_min";
            return path;
        }
        if (p.r > opt.r_max) {
            path.stop_reason = "r_max";
            return path;
        }
    }
    path.stop_reason = "max_steps";
    return path;
}

struct PathChecks {
    double max_relative_drift = 0; // of Q, relative to max(|Q0|, r0^{3/2})
    double min_f_increment = 0;
    bool f_increasing = true;
};

inline PathChecks check_path(const FlowPath &path, double f_tol = 1e-10)
{
    PathChecks c;
    const auto &p0 = path.samples.front().p;
    const double q0 = first_integral(p0);
    const double scale = std::max(std::abs(q0), std::pow(p0.r, 1.5));
    c.min_f_increment = INFINITY;
    for (std::size_t i = 1; i < path.samples.size(); ++i) {
        const auto &p = path.samples[i].p;
        if (p.r > 0)
            c.max_relative_drift = std::max(c.max_relative_drift, std::abs(first_integral(p) - q0) / scale);
        const double df = f_caustic(p) - f_caustic(path.samples[i - 1].p);
        c.min_f_increment = std::min(c.min_f_increment, df);
        if (!(df > -f_tol))
            c.f_increasing = false;
    }
    return c;
}

struct Separatrix {
    double theta_cover;      // in [0, 4 pi)
    double theta;            // mod 2 pi
    bool reaches_origin;     // backward flow from (r0, theta) hit r_min
    double backward_time;
};

struct SeparatrixOptions {
    double r0 = 1e-2;
    std::size_t grid = 720;
    double tol = 1e-12;
    double step = 1e-4;
    double r_min = 1e-8;
};

/// Zeros of sin(3t/2) on the cover with cos(3t/2) > 0, located by sign
/// changes on a shifted grid and bisection, then confirmed by flowing back
/// into the origin.
inline std::vector<Separatrix> find_separatrices(const SeparatrixOptions &opt = {})
{
    if (!(opt.r0 > 0) || opt.grid < 3 || !(opt.tol > 0))
        throw std::invalid_argument("bad separatrix search options");
    const double period = 4 * std::numbers::pi;
    const double h = period / static_cast<double>(opt.grid);
    auto s = [](double t) { return std::sin(1.5 * t); };
    std::vector<Separatrix> out;
    for (std::size_t k = 0; k < opt.grid; ++k) {
        double a = (static_cast<double>(k) + 0.5) * h;
        double b = a + h; // the last interval wraps past 4 pi
        double fa = s(a), fb = s(b);
        if (fa == 0 || fa * fb > 0)
            continue;
        while (b - a > opt.tol) {
            const double m = 0.5 * (a + b);
            const double fm = s(m);
            if (fm == 0) {
                a = b = m;
                break;
            }
            if ((fm > 0) == (fa > 0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        const double root = wrap_angle(0.5 * (a + b), period);
        if (!(std::cos(1.5 * root) > 0))
            continue;
        const double max_time = 4 * std::sqrt(opt.r0);
        const auto path = integrate_flow({opt.r0, root}, opt.step,
                                         static_cast<std::size_t>(max_time / opt.step) + 1,
                                         {opt.r_min, 10 * opt.r0 + 1, true});
        out.push_back({root, wrap_angle(root), path.stop_reason == "r_min", path.samples.back().t});
    }
    return out;
}

struct SymmetryCheck {
    double max_r_diff = 0;
    double max_theta_diff = 0; // after removing the rotation
};

/// A rotation of the base by 2 pi / 3 is theta -> theta + 8 pi / 3 on the
/// cover. Flows from (r, theta) and (r, theta + 8 pi / 3) are compared
/// sample by sample.
inline SymmetryCheck rotation_symmetry(const PolarPoint &start, double step, std::size_t steps)
{
    const double rot = 8 * std::numbers::pi / 3;
    const auto a = integrate_flow(start, step, steps);
    const auto b = integrate_flow({start.r, start.theta + rot}, step, steps);
    SymmetryCheck c;
    const auto n = std::min(a.samples.size(), b.samples.size());
    if (a.samples.size() != b.samples.size())
        c.max_r_diff = INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
        c.max_r_diff = std::max(c.max_r_diff, std::abs(a.samples[i].p.r - b.samples[i].p.r));
        c.max_theta_diff = std::max(c.max_theta_diff,
                                    angle_distance(b.samples[i].p.theta, a.samples[i].p.theta + 2 * std::numbers::pi / 3));
    }
    return c;
}

} // namespace tropmirror
