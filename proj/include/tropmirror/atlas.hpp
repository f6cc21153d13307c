#pragma once

// Affine charts of the toric surface of a complete simplicial fan and the
// monomial maps relating chart coordinates to torus coordinates.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "tropmirror/fan.hpp"
#include "tropmirror/laurent.hpp"

namespace tropmirror {

/// Chart k has one variable per ray i of cone k, namely w^m with
/// <m, v_i> = -1 and <m, v_l> = 0 for the other ray l. Every context carries
/// the same trailing extra slots (parameters, solver unknowns).
class Atlas {
public:
    explicit Atlas(Fan fan = build_p2_fan(), std::vector<std::string> extra = {})
        : fan_(std::move(fan)), extra_(std::move(extra))
    {
        std::vector<std::string> tnames{"w1", "w2"};
        tnames.insert(tnames.end(), extra_.begin(), extra_.end());
        torus_ = make_context(tnames);
        for (std::size_t k = 0; k < fan_.num_cones(); ++k) {
            const auto &rs = fan_.cone_rays(k);
            if (rs.size() != 2)
                throw std::invalid_argument("charts need two-dimensional cones");
            const auto &u = fan_.rays()[rs[0]];
            const auto &w = fan_.rays()[rs[1]];
            const auto d = det2(u, w);
            if (d != 1 && d != -1)
                throw std::invalid_argument("cone " + std::to_string(k) + " is not smooth");
            // m_u: <m,u> = -1, <m,w> = 0 ; m_w: <m,u> = 0, <m,w> = -1
            const LatticeVector mu{-w.y / d, w.x / d};
            const LatticeVector mw{u.y / d, -u.x / d};
            exps_.push_back({mu, mw});
            std::vector<std::string> names{"w" + std::to_string(k) + "_" + std::to_string(rs[0]),
                                           "w" + std::to_string(k) + "_" + std::to_string(rs[1])};
            names.insert(names.end(), extra_.begin(), extra_.end());
            charts_.push_back(make_context(names));
        }
        for (std::size_t k = 0; k < charts_.size(); ++k) {
            to_torus_.push_back(build_to_torus(k));
            from_torus_.push_back(to_torus_.back().inverse());
        }
    }

    const Fan &fan() const { return fan_; }
    const std::vector<std::string> &extra() const { return extra_; }
    std::size_t num_charts() const { return charts_.size(); }
    const ContextPtr &chart(std::size_t k) const { return charts_.at(k); }
    const ContextPtr &torus() const { return torus_; }

    /// Torus exponent of chart k's variable in slot s.
    const Covector &variable_exponent(std::size_t k, std::size_t s) const { return exps_.at(k).at(s); }

    const MonomialMap &to_torus(std::size_t k) const { return to_torus_.at(k); }
    const MonomialMap &from_torus(std::size_t k) const { return from_torus_.at(k); }

    /// Chart-k exponent (first two slots) of the character w^m.
    std::pair<int, int> chart_exponent(std::size_t k, const Covector &m) const
    {
        Exponent e(2 + extra_.size(), 0);
        e[0] = static_cast<int>(m.x);
        e[1] = static_cast<int>(m.y);
        const auto c = from_torus(k).apply(e);
        return {c[0], c[1]};
    }

    Covector torus_exponent(std::size_t k, int e0, int e1) const
    {
        return variable_exponent(k, 0) * e0 + variable_exponent(k, 1) * e1;
    }

    /// w^m as an element of chart k's ring, times c.
    LaurentPolynomial character(std::size_t k, const Covector &m, const LaurentPolynomial &c) const
    {
        const auto [e0, e1] = chart_exponent(k, m);
        Exponent e(2 + extra_.size(), 0);
        e[0] = e0;
        e[1] = e1;
        return LaurentPolynomial::monomial(charts_[k], std::move(e)) * c;
    }

    /// Ray shared by the cones of charts i and j.
    std::size_t overlap_ray(std::size_t i, std::size_t j) const
    {
        const auto r = fan_.shared_ray(i, j);
        if (!r)
            throw std::invalid_argument("charts " + std::to_string(i) + "," + std::to_string(j) + " do not overlap");
        return *r;
    }

    /// Generators against which regularity on U_i cap U_j is tested: the
    /// negated shared ray (charts are regular where <m, v> <= 0).
    std::vector<LatticeVector> overlap_test_generators(std::size_t i, std::size_t j) const
    {
        return {-fan_.rays()[overlap_ray(i, j)]};
    }

    /// Same atlas with more trailing slots.
    Atlas extended(const std::vector<std::string> &more) const
    {
        auto e = extra_;
        e.insert(e.end(), more.begin(), more.end());
        return Atlas(fan_, e);
    }

private:
    MonomialMap build_to_torus(std::size_t k) const
    {
        const auto n = 2 + extra_.size();
        std::vector<std::vector<int>> m(n, std::vector<int>(n, 0));
        for (std::size_t s = 0; s < 2; ++s) {
            m[s][0] = static_cast<int>(exps_[k][s].x);
            m[s][1] = static_cast<int>(exps_[k][s].y);
        }
        for (std::size_t e = 2; e < n; ++e)
            m[e][e] = 1;
        return {charts_[k], torus_, std::move(m)};
    }

    Fan fan_;
    std::vector<std::string> extra_;
    ContextPtr torus_;
    std::vector<ContextPtr> charts_;
    std::vector<std::array<Covector, 2>> exps_;
    std::vector<MonomialMap> to_torus_;
    std::vector<MonomialMap> from_torus_;
};

/// Moves a polynomial into a context that shares its leading slots and has
/// extra trailing ones (or fewer, if the dropped slots are unused).
inline LaurentPolynomial reslot(const LaurentPolynomial &p, const ContextPtr &target)
{
    LaurentPolynomial r(target);
    const auto n = target->size();
    for (const auto &[e, c] : p.terms()) {
        Exponent ne(n, 0);
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (i < n)
                ne[i] = e[i];
            else if (e[i] != 0)
                throw ContextError("dropping a slot that is in use");
        }
        r.add_term(ne, c);
    }
    return r;
}

} // namespace tropmirror
