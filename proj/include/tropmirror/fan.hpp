#pragma once

// Cones, complete fans in rank 2, dual cones and piecewise-linear functions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tropmirror/lattice.hpp"
#include "tropmirror/laurent.hpp"

namespace tropmirror {

struct Cone {
    std::vector<LatticeVector> rays;

    std::size_t dimension() const { return rays.size(); }

    /// Membership of an integral point (closed cone).
    bool contains(const LatticeVector &p) const
    {
        if (rays.empty())
            return p.is_zero();
        if (rays.size() == 1) {
            const auto &u = rays[0];
            return det2(u, p) == 0 && pairing(u, p) >= 0;
        }
        // p = alpha u + beta w with alpha, beta >= 0
        const auto &u = rays[0];
        const auto &w = rays[1];
        const auto d = det2(u, w);
        const auto alpha = det2(p, w);
        const auto beta = det2(u, p);
        return d > 0 ? (alpha >= 0 && beta >= 0) : (alpha <= 0 && beta <= 0);
    }

    void validate() const
    {
        for (const auto &r : rays)
            if (!r.is_primitive())
                throw std::invalid_argument("cone generator " + r.str() + " is not primitive");
        if (rays.size() == 2 && det2(rays[0], rays[1]) == 0)
            throw std::invalid_argument("cone generators are parallel");
        if (rays.size() > 2)
            throw std::invalid_argument("rank-2 cones have at most two generators");
    }
};

/// Dual of a cone in rank 2: all of M, a closed half-plane, or a pointed cone.
struct DualCone {
    enum class Kind { Whole, HalfPlane, Pointed };
    Kind kind = Kind::Whole;
    std::vector<Covector> generators; // Pointed: the two extremal rays
    LatticeVector normal;              // HalfPlane: {m : <m, normal> >= 0}

    bool contains(const Covector &m) const
    {
        switch (kind) {
        case Kind::Whole:
            return true;
        case Kind::HalfPlane:
            return pairing(m, normal) >= 0;
        case Kind::Pointed:
            return Cone{generators}.contains(m);
        }
        return false;
    }
};

inline DualCone dual_cone(const Cone &c)
{
    c.validate();
    DualCone d;
    if (c.rays.empty())
        return d;
    if (c.rays.size() == 1) {
        d.kind = DualCone::Kind::HalfPlane;
        d.normal = c.rays[0];
        return d;
    }
    d.kind = DualCone::Kind::Pointed;
    for (std::size_t i = 0; i < 2; ++i) {
        const auto &u = c.rays[i];
        const auto &other = c.rays[1 - i];
        LatticeVector perp = primitive({-u.y, u.x});
        if (pairing(perp, other) < 0)
            perp = -perp;
        d.generators.push_back(perp);
    }
    // Keep the generator order matching the face order: the perpendicular
    // to the second ray is the one that is positive on the first.
    std::swap(d.generators[0], d.generators[1]);
    return d;
}

/// Dual of a pointed dual cone, back in N.
inline Cone dual_of_dual(const DualCone &d)
{
    if (d.kind != DualCone::Kind::Pointed)
        throw std::invalid_argument("only pointed dual cones are dualized back");
    return Cone{dual_cone(Cone{d.generators}).generators};
}

class Fan {
public:
    Fan() = default;
    Fan(std::vector<LatticeVector> rays, std::vector<std::vector<std::size_t>> cones)
        : rays_(std::move(rays)), cones_(std::move(cones))
    {
        for (const auto &r : rays_)
            if (!r.is_primitive())
                throw std::invalid_argument("ray " + r.str() + " is not primitive");
        for (std::size_t i = 0; i < rays_.size(); ++i)
            for (std::size_t j = i + 1; j < rays_.size(); ++j)
                if (rays_[i] == rays_[j])
                    throw std::invalid_argument("duplicate ray " + rays_[i].str());
        for (const auto &c : cones_) {
            for (auto r : c)
                if (r >= rays_.size())
                    throw std::invalid_argument("cone references a missing ray");
            cone(&c - cones_.data()).validate();
        }
    }

    const std::vector<LatticeVector> &rays() const { return rays_; }
    std::size_t num_cones() const { return cones_.size(); }
    const std::vector<std::size_t> &cone_rays(std::size_t i) const { return cones_.at(i); }
    Cone cone(std::size_t i) const
    {
        Cone c;
        for (auto r : cones_.at(i))
            c.rays.push_back(rays_.at(r));
        return c;
    }

    bool cone_has_ray(std::size_t cone_index, std::size_t ray) const
    {
        const auto &c = cones_.at(cone_index);
        return std::find(c.begin(), c.end(), ray) != c.end();
    }

    /// Ray index shared by two distinct maximal cones, if any.
    std::optional<std::size_t> shared_ray(std::size_t a, std::size_t b) const
    {
        if (a == b)
            return std::nullopt;
        for (auto r : cones_.at(a))
            if (cone_has_ray(b, r))
                return r;
        return std::nullopt;
    }

    std::vector<std::size_t> cones_containing_ray(std::size_t ray) const
    {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < cones_.size(); ++i)
            if (cone_has_ray(i, ray))
                out.push_back(i);
        return out;
    }

    std::optional<std::size_t> ray_index(const LatticeVector &v) const
    {
        for (std::size_t i = 0; i < rays_.size(); ++i)
            if (rays_[i] == v)
                return i;
        return std::nullopt;
    }

    /// Every primitive direction in a box lands in some maximal cone.
    bool is_complete(int box = 6) const
    {
        for (int x = -box; x <= box; ++x)
            for (int y = -box; y <= box; ++y) {
                const LatticeVector p{x, y};
                if (p.is_zero() || !p.is_primitive())
                    continue;
                bool hit = false;
                for (std::size_t i = 0; i < cones_.size() && !hit; ++i)
                    hit = cone(i).contains(p);
                if (!hit)
                    return false;
            }
        return true;
    }

    /// Maximal cones in counterclockwise order of their bisectors, starting
    /// at `start`.
    std::vector<std::size_t> cyclic_order(std::size_t start) const
    {
        std::vector<std::pair<double, std::size_t>> angles;
        for (std::size_t i = 0; i < cones_.size(); ++i) {
            double sx = 0, sy = 0;
            for (auto r : cones_[i]) {
                const auto &v = rays_[r];
                const double n = std::hypot(double(v.x), double(v.y));
                sx += v.x / n;
                sy += v.y / n;
            }
            angles.emplace_back(std::atan2(sy, sx), i);
        }
        std::sort(angles.begin(), angles.end());
        std::vector<std::size_t> order;
        for (const auto &a : angles)
            order.push_back(a.second);
        const auto it = std::find(order.begin(), order.end(), start);
        if (it == order.end())
            throw std::out_of_range("no such cone");
        std::rotate(order.begin(), it, order.end());
        return order;
    }

    bool operator==(const Fan &) const = default;

    nlohmann::json to_json() const
    {
        nlohmann::json j;
        j["rays"] = nlohmann::json::array();
        for (const auto &r : rays_)
            j["rays"].push_back({r.x, r.y});
        j["cones"] = cones_;
        return j;
    }

    static Fan from_json(const nlohmann::json &j)
    {
        std::vector<LatticeVector> rays;
        for (const auto &r : j.at("rays"))
            rays.emplace_back(r.at(0).get<std::int64_t>(), r.at(1).get<std::int64_t>());
        return Fan(std::move(rays), j.at("cones").get<std::vector<std::vector<std::size_t>>>());
    }

private:
    std::vector<LatticeVector> rays_;
    std::vector<std::vector<std::size_t>> cones_;
};

/// Rays v0=(1,1), v1=(-1,0), v2=(0,-1); cone k is spanned by the two rays
/// other than v_k.
inline Fan build_p2_fan()
{
    return Fan({{1, 1}, {-1, 0}, {0, -1}}, {{1, 2}, {0, 2}, {0, 1}});
}

/// Rational point of M_Q.
struct RationalCovector {
    Rational x, y;
};

class NonIntegralSlopeError : public std::domain_error {
public:
    NonIntegralSlopeError(std::size_t cone, RationalCovector slope)
        : std::domain_error("cone " + std::to_string(cone) + " has non-integral slope (" + slope.x.str() + "," +
                            slope.y.str() + ")"),
          cone_(cone), slope_(std::move(slope))
    {
    }
    std::size_t cone() const { return cone_; }
    const RationalCovector &slope() const { return slope_; }

private:
    std::size_t cone_;
    RationalCovector slope_;
};

/// Fan plus one affine functional <m_sigma, .> + b_sigma per maximal cone.
struct PLFunction {
    Fan fan;
    std::vector<Covector> slopes;
    std::vector<Rational> offsets;

    Rational value_on_cone(std::size_t cone, const LatticeVector &v) const
    {
        return Rational(pairing(slopes.at(cone), v)) + offsets.at(cone);
    }

    /// Value at a ray generator, read off any cone containing it.
    Rational ray_value(std::size_t ray) const
    {
        const auto cs = fan.cones_containing_ray(ray);
        if (cs.empty())
            throw std::out_of_range("ray is in no maximal cone");
        return value_on_cone(cs.front(), fan.rays()[ray]);
    }

    std::vector<Rational> ray_values() const
    {
        std::vector<Rational> out;
        for (std::size_t r = 0; r < fan.rays().size(); ++r)
            out.push_back(ray_value(r));
        return out;
    }

    bool is_continuous() const
    {
        for (std::size_t r = 0; r < fan.rays().size(); ++r) {
            const auto cs = fan.cones_containing_ray(r);
            for (auto c : cs)
                if (value_on_cone(c, fan.rays()[r]) != value_on_cone(cs.front(), fan.rays()[r]))
                    return false;
        }
        return true;
    }

    bool operator==(const PLFunction &) const = default;

    nlohmann::json to_json() const
    {
        nlohmann::json j;
        j["fan"] = fan.to_json();
        j["slopes"] = nlohmann::json::array();
        for (const auto &m : slopes)
            j["slopes"].push_back({m.x, m.y});
        j["ray_values"] = nlohmann::json::array();
        for (const auto &v : ray_values())
            j["ray_values"].push_back(v.str());
        return j;
    }
};

/// Solves <m_sigma, v> = value(v) on the two rays of every maximal cone.
inline PLFunction pl_from_ray_values(const Fan &fan, const std::vector<Rational> &values)
{
    if (values.size() != fan.rays().size())
        throw std::invalid_argument("one value per ray is required");
    PLFunction f{fan, {}, {}};
    for (std::size_t c = 0; c < fan.num_cones(); ++c) {
        const auto &rs = fan.cone_rays(c);
        if (rs.size() != 2)
            throw std::invalid_argument("pl_from_ray_values needs two-dimensional maximal cones");
        const auto &u = fan.rays()[rs[0]];
        const auto &w = fan.rays()[rs[1]];
        const Rational a = values[rs[0]], b = values[rs[1]];
        const Rational d = det2(u, w);
        // Cramer on [u; w] m = (a, b)
        RationalCovector m{(a * w.y - b * u.y) / d, (u.x * b - w.x * a) / d};
        if (denominator(m.x) != 1 || denominator(m.y) != 1)
            throw NonIntegralSlopeError(c, m);
        f.slopes.emplace_back(numerator(m.x).convert_to<std::int64_t>(), numerator(m.y).convert_to<std::int64_t>());
        f.offsets.emplace_back(0);
    }
    return f;
}

inline PLFunction pl_from_ray_values(const Fan &fan, const std::vector<std::int64_t> &values)
{
    std::vector<Rational> q(values.begin(), values.end());
    return pl_from_ray_values(fan, q);
}

/// For every adjacent pair (sigma, sigma'), the slope jump m_sigma' - m_sigma
/// must pair strictly positively with the ray of sigma' not shared with sigma.
inline bool pl_is_strictly_convex(const PLFunction &f)
{
    const auto &fan = f.fan;
    bool any_pair = false;
    for (std::size_t a = 0; a < fan.num_cones(); ++a)
        for (std::size_t b = 0; b < fan.num_cones(); ++b) {
            const auto shared = fan.shared_ray(a, b);
            if (!shared)
                continue;
            any_pair = true;
            for (auto r : fan.cone_rays(b)) {
                if (r == *shared)
                    continue;
                if (pairing(f.slopes[b] - f.slopes[a], fan.rays()[r]) <= 0)
                    return false;
            }
        }
    return any_pair;
}

} // namespace tropmirror
