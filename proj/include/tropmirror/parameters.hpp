#pragma once

// The six gluing constants a_0, b_0, a_1, b_1, a_2, b_2.

#include <array>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "tropmirror/laurent.hpp"

namespace tropmirror {

enum class ParameterMode {
    Instantiated,   // six exact rationals
    Parametric,     // a0 b0 a1 b1 a2 symbolic, b2 = -(a0 b0 a1 b1 a2)^-1
    FreeParametric, // all six symbolic, no constraint
};

/// Monomial c * prod p_k^{e_k} in the parameter variables.
struct ParamMonomial {
    Rational coeff = 1;
    std::vector<int> exps;
};

class Constants {
public:
    static constexpr std::array<const char *, 6> names{"a0", "b0", "a1", "b1", "a2", "b2"};

    static Constants instantiated(const std::array<Rational, 6> &v)
    {
        Constants c;
        c.mode_ = ParameterMode::Instantiated;
        for (std::size_t k = 0; k < 6; ++k) {
            if (v[k] == 0)
                throw NotInvertibleError("gluing constants must be nonzero", names[k]);
            c.values_[k] = {v[k], {}};
        }
        return c;
    }

    static Constants parametric()
    {
        Constants c;
        c.mode_ = ParameterMode::Parametric;
        c.params_ = {"a0", "b0", "a1", "b1", "a2"};
        for (std::size_t k = 0; k < 5; ++k) {
            std::vector<int> e(5, 0);
            e[k] = 1;
            c.values_[k] = {1, e};
        }
        c.values_[5] = {-1, std::vector<int>(5, -1)};
        return c;
    }

    static Constants free_parametric()
    {
        Constants c;
        c.mode_ = ParameterMode::FreeParametric;
        c.params_ = {names.begin(), names.end()};
        for (std::size_t k = 0; k < 6; ++k) {
            std::vector<int> e(6, 0);
            e[k] = 1;
            c.values_[k] = {1, e};
        }
        return c;
    }

    /// Constants satisfying prod a_i b_i = -1 with small random rationals;
    /// b2 is solved for.
    static Constants random_constrained(std::mt19937_64 &rng)
    {
        std::uniform_int_distribution<int> num(1, 9);
        std::uniform_int_distribution<int> sign(0, 1);
        std::array<Rational, 6> v;
        Rational prod = 1;
        for (std::size_t k = 0; k < 5; ++k) {
            v[k] = Rational(num(rng), num(rng));
            if (sign(rng))
                v[k] = -v[k];
            prod *= v[k];
        }
        v[5] = -1 / prod;
        return instantiated(v);
    }

    ParameterMode mode() const { return mode_; }
    const std::vector<std::string> &parameter_names() const { return params_; }
    const ParamMonomial &value(std::size_t k) const { return values_.at(k); }
    const ParamMonomial &a(std::size_t i) const { return values_.at(2 * i); }
    const ParamMonomial &b(std::size_t i) const { return values_.at(2 * i + 1); }

    /// The constant as an element of a context whose slots from `offset`
    /// on are the parameter variables.
    LaurentPolynomial embed(const ParamMonomial &m, const ContextPtr &ctx, std::size_t offset) const
    {
        Exponent e(ctx->size(), 0);
        for (std::size_t k = 0; k < m.exps.size(); ++k)
            e.at(offset + k) = m.exps[k];
        return LaurentPolynomial::monomial(ctx, std::move(e), m.coeff);
    }

    std::array<Rational, 6> rational_values() const
    {
        if (mode_ != ParameterMode::Instantiated)
            throw std::logic_error("constants are symbolic");
        std::array<Rational, 6> v;
        for (std::size_t k = 0; k < 6; ++k)
            v[k] = values_[k].coeff;
        return v;
    }

    /// Specializes symbolic constants at values for the parameter variables.
    Constants instantiate(const std::vector<Rational> &param_values) const
    {
        if (param_values.size() != params_.size())
            throw std::invalid_argument("one value per parameter variable is required");
        std::array<Rational, 6> v;
        for (std::size_t k = 0; k < 6; ++k) {
            Rational x = values_[k].coeff;
            for (std::size_t p = 0; p < values_[k].exps.size(); ++p) {
                const int e = values_[k].exps[p];
                for (int n = 0; n < (e < 0 ? -e : e); ++n)
                    x = e < 0 ? x / param_values[p] : x * param_values[p];
            }
            v[k] = x;
        }
        return instantiated(v);
    }

    /// prod a_i b_i as a parameter monomial.
    ParamMonomial product() const
    {
        ParamMonomial p{1, std::vector<int>(params_.size(), 0)};
        for (const auto &m : values_) {
            p.coeff *= m.coeff;
            for (std::size_t k = 0; k < m.exps.size(); ++k)
                p.exps[k] += m.exps[k];
        }
        return p;
    }

    /// True when prod a_i b_i = -1 holds identically.
    bool satisfies_constraint() const
    {
        const auto p = product();
        for (int e : p.exps)
            if (e != 0)
                return false;
        return p.coeff == -1;
    }

    std::string describe() const
    {
        switch (mode_) {
        case ParameterMode::Parametric:
            return "parametric (b2 = -(a0*b0*a1*b1*a2)^-1)";
        case ParameterMode::FreeParametric:
            return "free parametric";
        case ParameterMode::Instantiated:
            break;
        }
        std::string s;
        for (std::size_t k = 0; k < 6; ++k)
            s += std::string(k ? "," : "") + names[k] + "=" + values_[k].coeff.str();
        return s;
    }

private:
    ParameterMode mode_ = ParameterMode::Instantiated;
    std::vector<std::string> params_;
    std::array<ParamMonomial, 6> values_;
};

/// Parses "a0=-1,b0=1,..."; all six keys are required.
inline std::array<Rational, 6> parse_constants(const std::string &text)
{
    std::array<Rational, 6> v;
    std::array<bool, 6> seen{};
    std::size_t start = 0;
    while (start < text.size()) {
        auto stop = text.find(',', start);
        if (stop == std::string::npos)
            stop = text.size();
        const auto item = text.substr(start, stop - start);
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("expected key=value in '" + item + "'");
        const auto key = item.substr(0, eq);
        std::size_t k = 0;
        while (k < 6 && key != Constants::names[k])
            ++k;
        if (k == 6)
            throw std::invalid_argument("unknown constant '" + key + "'");
        v[k] = parse_rational(item.substr(eq + 1));
        seen[k] = true;
        start = stop + 1;
    }
    for (std::size_t k = 0; k < 6; ++k)
        if (!seen[k])
            throw std::invalid_argument(std::string("missing constant ") + Constants::names[k]);
    return v;
}

} // namespace tropmirror
