#pragma once

// Sparse multivariate Laurent polynomials with exact rational coefficients,
// and monomial changes of variables between them.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

#include "tropmirror/lattice.hpp"

namespace tropmirror {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational, boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int, boost::multiprecision::et_off>;

inline std::string to_string(const Rational &q) { return q.str(); }

inline Rational parse_rational(std::string_view s)
{
    std::string t(s);
    t.erase(std::remove_if(t.begin(), t.end(), [](unsigned char c) { return std::isspace(c); }), t.end());
    if (t.empty())
        throw std::invalid_argument("empty rational literal");
    if (t.front() == '+')
        t.erase(t.begin());
    const auto slash = t.find('/');
    auto digits_ok = [](std::string_view d) {
        if (!d.empty() && d.front() == '-')
            d.remove_prefix(1);
        return !d.empty() && std::all_of(d.begin(), d.end(), [](unsigned char c) { return std::isdigit(c); });
    };
    if (slash == std::string::npos) {
        if (!digits_ok(t))
            throw std::invalid_argument("bad rational literal '" + std::string(s) + "'");
        return Rational(Integer(t));
    }
    const auto num = t.substr(0, slash);
    const auto den = t.substr(slash + 1);
    if (!digits_ok(num) || !digits_ok(den) || den.front() == '-')
        throw std::invalid_argument("bad rational literal '" + std::string(s) + "'");
    const Integer d(den);
    if (d == 0)
        throw std::invalid_argument("zero denominator in '" + std::string(s) + "'");
    return Rational(Integer(num), d);
}

/// Thrown when operands live in different variable contexts.
class ContextError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when an inverse is requested for a non-unit; carries the offending
/// element (a polynomial or determinant) in canonical text form.
class NotInvertibleError : public std::domain_error {
public:
    NotInvertibleError(const std::string &what, std::string witness)
        : std::domain_error(what + ": " + witness), witness_(std::move(witness))
    {
    }
    const std::string &witness() const { return witness_; }

private:
    std::string witness_;
};

/// Ordered list of variable names. Two contexts are compatible iff their
/// names agree position by position.
class VariableContext {
public:
    explicit VariableContext(std::vector<std::string> names) : names_(std::move(names)) {}

    std::size_t size() const { return names_.size(); }
    const std::string &name(std::size_t i) const { return names_.at(i); }
    const std::vector<std::string> &names() const { return names_; }

    std::optional<std::size_t> index_of(std::string_view n) const
    {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == n)
                return i;
        return std::nullopt;
    }

    bool operator==(const VariableContext &) const = default;

private:
    std::vector<std::string> names_;
};

using ContextPtr = std::shared_ptr<const VariableContext>;

inline ContextPtr make_context(std::vector<std::string> names)
{
    return std::make_shared<const VariableContext>(std::move(names));
}

inline bool same_context(const ContextPtr &a, const ContextPtr &b)
{
    return a == b || (a && b && *a == *b);
}

using Exponent = std::vector<int>;

class MonomialMap;

class LaurentPolynomial {
public:
    using TermMap = std::map<Exponent, Rational>;

    LaurentPolynomial() = default;
    explicit LaurentPolynomial(ContextPtr ctx) : ctx_(std::move(ctx)) {}

    static LaurentPolynomial constant(ContextPtr ctx, const Rational &c)
    {
        LaurentPolynomial p(ctx);
        if (c != 0)
            p.terms_.emplace(Exponent(p.ctx_->size(), 0), c);
        return p;
    }

    static LaurentPolynomial monomial(ContextPtr ctx, Exponent e, const Rational &c = Rational(1))
    {
        if (e.size() != ctx->size())
            throw ContextError("exponent length does not match context");
        LaurentPolynomial p(std::move(ctx));
        if (c != 0)
            p.terms_.emplace(std::move(e), c);
        return p;
    }

    static LaurentPolynomial variable(ContextPtr ctx, std::size_t i, int power = 1)
    {
        Exponent e(ctx->size(), 0);
        e.at(i) = power;
        return monomial(std::move(ctx), std::move(e));
    }

    const ContextPtr &context() const { return ctx_; }
    const TermMap &terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

    bool is_zero() const { return terms_.empty(); }
    bool is_monomial() const { return terms_.size() == 1; }
    bool is_one() const
    {
        return terms_.size() == 1 && terms_.begin()->second == 1 &&
               std::all_of(terms_.begin()->first.begin(), terms_.begin()->first.end(), [](int k) { return k == 0; });
    }
    bool is_constant() const
    {
        return terms_.empty() || (terms_.size() == 1 && std::all_of(terms_.begin()->first.begin(),
                                                                    terms_.begin()->first.end(),
                                                                    [](int k) { return k == 0; }));
    }
    Rational constant_term() const
    {
        if (!ctx_)
            return 0;
        auto it = terms_.find(Exponent(ctx_->size(), 0));
        return it == terms_.end() ? Rational(0) : it->second;
    }

    /// Adds c * w^e in place.
    void add_term(const Exponent &e, const Rational &c)
    {
        if (e.size() != ctx_->size())
            throw ContextError("exponent length does not match context");
        if (c == 0)
            return;
        auto [it, inserted] = terms_.try_emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0)
                terms_.erase(it);
        }
    }

    LaurentPolynomial &operator+=(const LaurentPolynomial &o)
    {
        check(o);
        for (const auto &[e, c] : o.terms_)
            add_term(e, c);
        return *this;
    }
    LaurentPolynomial &operator-=(const LaurentPolynomial &o)
    {
        check(o);
        for (const auto &[e, c] : o.terms_)
            add_term(e, -c);
        return *this;
    }
    LaurentPolynomial &operator*=(const LaurentPolynomial &o)
    {
        *this = *this * o;
        return *this;
    }

    friend LaurentPolynomial operator+(LaurentPolynomial a, const LaurentPolynomial &b) { return a += b; }
    friend LaurentPolynomial operator-(LaurentPolynomial a, const LaurentPolynomial &b) { return a -= b; }
    friend LaurentPolynomial operator-(const LaurentPolynomial &a)
    {
        LaurentPolynomial r(a.ctx_);
        for (const auto &[e, c] : a.terms_)
            r.terms_.emplace_hint(r.terms_.end(), e, -c);
        return r;
    }

    friend LaurentPolynomial operator*(const LaurentPolynomial &a, const LaurentPolynomial &b)
    {
        a.check(b);
        LaurentPolynomial r(a.ctx_);
        const auto n = a.ctx_->size();
        Exponent e(n);
        for (const auto &[ea, ca] : a.terms_)
            for (const auto &[eb, cb] : b.terms_) {
                for (std::size_t i = 0; i < n; ++i)
                    e[i] = ea[i] + eb[i];
                r.add_term(e, ca * cb);
            }
        return r;
    }

    friend LaurentPolynomial operator*(const Rational &k, const LaurentPolynomial &p)
    {
        LaurentPolynomial r(p.ctx_);
        if (k == 0)
            return r;
        for (const auto &[e, c] : p.terms_)
            r.terms_.emplace_hint(r.terms_.end(), e, k * c);
        return r;
    }

    bool operator==(const LaurentPolynomial &o) const
    {
        return same_context(ctx_, o.ctx_) && terms_ == o.terms_;
    }

    /// Multiplicative inverse; defined only for units (single nonzero term).
    LaurentPolynomial inverse() const
    {
        if (!is_monomial())
            throw NotInvertibleError("not a unit of the Laurent ring", to_string());
        const auto &[e, c] = *terms_.begin();
        Exponent ne(e.size());
        std::transform(e.begin(), e.end(), ne.begin(), [](int k) { return -k; });
        return monomial(ctx_, std::move(ne), 1 / c);
    }

    /// Integer power; negative powers require a unit.
    LaurentPolynomial pow(int k) const
    {
        LaurentPolynomial base = k < 0 ? inverse() : *this;
        auto result = constant(ctx_, 1);
        for (int n = k < 0 ? -k : k; n > 0; n >>= 1) {
            if (n & 1)
                result = result * base;
            if (n > 1)
                base = base * base;
        }
        return result;
    }

    int max_degree(std::size_t var) const
    {
        int d = 0;
        bool first = true;
        for (const auto &[e, c] : terms_) {
            d = first ? e[var] : std::max(d, e[var]);
            first = false;
        }
        return d;
    }
    int min_degree(std::size_t var) const
    {
        int d = 0;
        bool first = true;
        for (const auto &[e, c] : terms_) {
            d = first ? e[var] : std::min(d, e[var]);
            first = false;
        }
        return d;
    }
    bool involves(std::size_t var) const
    {
        return std::any_of(terms_.begin(), terms_.end(), [var](const auto &t) { return t.first[var] != 0; });
    }

    /// Groups terms by the exponent of one variable; the returned
    /// coefficients have that exponent set to zero.
    std::map<int, LaurentPolynomial> split_by(std::size_t var) const
    {
        std::map<int, LaurentPolynomial> out;
        for (const auto &[e, c] : terms_) {
            auto stripped = e;
            stripped[var] = 0;
            auto [it, _] = out.try_emplace(e[var], ctx_);
            it->second.add_term(stripped, c);
        }
        return out;
    }

    /// Replaces variable `var` by the polynomial q (same context).
    /// Negative powers of the variable need q to be a unit.
    LaurentPolynomial substitute_variable(std::size_t var, const LaurentPolynomial &q) const
    {
        check(q);
        LaurentPolynomial result(ctx_);
        std::map<int, LaurentPolynomial> powers;
        for (const auto &[k, coeff] : split_by(var)) {
            auto it = powers.find(k);
            if (it == powers.end())
                it = powers.emplace(k, q.pow(k)).first;
            result += coeff * it->second;
        }
        return result;
    }

    LaurentPolynomial evaluate_variable(std::size_t var, const Rational &value) const
    {
        return substitute_variable(var, constant(ctx_, value));
    }

    LaurentPolynomial substitute(const MonomialMap &map) const;

    /// Re-expresses the polynomial in a context whose slot slot_map[i]
    /// receives the exponent of old slot i. Unmapped new slots get 0.
    LaurentPolynomial rebase(ContextPtr target, std::span<const std::size_t> slot_map) const
    {
        if (slot_map.size() != ctx_->size())
            throw ContextError("slot map does not cover the source context");
        LaurentPolynomial r(target);
        for (const auto &[e, c] : terms_) {
            Exponent ne(target->size(), 0);
            for (std::size_t i = 0; i < e.size(); ++i)
                ne.at(slot_map[i]) += e[i];
            r.add_term(ne, c);
        }
        return r;
    }

    /// Canonical text: terms in ascending lexicographic exponent order,
    /// e.g. "-3/2*w1^-2*w2^1 + 1".
    std::string to_string() const
    {
        if (terms_.empty())
            return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto &[e, c] : terms_) {
            const bool neg = c < 0;
            const Rational mag = neg ? Rational(-c) : c;
            if (first)
                os << (neg ? "-" : "");
            else
                os << (neg ? " - " : " + ");
            first = false;
            std::vector<std::string> factors;
            for (std::size_t i = 0; i < e.size(); ++i)
                if (e[i] != 0)
                    factors.push_back(ctx_->name(i) + "^" + std::to_string(e[i]));
            if (factors.empty()) {
                os << mag.str();
                continue;
            }
            if (mag != 1)
                os << mag.str() << "*";
            for (std::size_t k = 0; k < factors.size(); ++k)
                os << (k ? "*" : "") << factors[k];
        }
        return os.str();
    }

    static LaurentPolynomial parse(ContextPtr ctx, std::string_view text);

private:
    void check(const LaurentPolynomial &o) const
    {
        if (!ctx_ || !o.ctx_ || !same_context(ctx_, o.ctx_))
            throw ContextError("polynomials live in different variable contexts");
    }

    ContextPtr ctx_;
    TermMap terms_;
};

inline std::ostream &operator<<(std::ostream &os, const LaurentPolynomial &p) { return os << p.to_string(); }

inline LaurentPolynomial LaurentPolynomial::parse(ContextPtr ctx, std::string_view text)
{
    auto fail = [&](const std::string &why) {
        throw std::invalid_argument("cannot parse polynomial '" + std::string(text) + "': " + why);
    };
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch)))
            s.push_back(ch);
    if (s.empty())
        fail("empty");

    // Split at top-level signs; a sign right after '^' or '/' belongs to a number.
    std::vector<std::pair<bool, std::string>> raw_terms;
    bool negative = false;
    std::string current;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char ch = s[i];
        const bool sign = ch == '+' || ch == '-';
        const bool attached = i > 0 && (s[i - 1] == '^' || s[i - 1] == '/' || s[i - 1] == '*');
        if (sign && !attached) {
            if (!current.empty())
                raw_terms.emplace_back(negative, current);
            else if (i > 0)
                fail("dangling operator");
            current.clear();
            negative = ch == '-';
        } else {
            current.push_back(ch);
        }
    }
    if (current.empty())
        fail("trailing operator");
    raw_terms.emplace_back(negative, current);

    LaurentPolynomial result(ctx);
    for (const auto &[neg, term] : raw_terms) {
        Rational coeff = neg ? -1 : 1;
        Exponent e(ctx->size(), 0);
        std::size_t start = 0;
        while (start <= term.size()) {
            const auto stop = term.find('*', start);
            const auto factor = term.substr(start, stop == std::string::npos ? std::string::npos : stop - start);
            if (factor.empty())
                fail("empty factor");
            if (std::isdigit(static_cast<unsigned char>(factor.front())) || factor.front() == '-') {
                coeff *= parse_rational(factor);
            } else {
                const auto caret = factor.find('^');
                const auto name = factor.substr(0, caret);
                const auto idx = ctx->index_of(name);
                if (!idx)
                    fail("unknown variable '" + name + "'");
                int power = 1;
                if (caret != std::string::npos) {
                    try {
                        std::size_t used = 0;
                        power = std::stoi(factor.substr(caret + 1), &used);
                        if (used != factor.size() - caret - 1)
                            fail("bad exponent");
                    } catch (const std::logic_error &) {
                        fail("bad exponent");
                    }
                }
                e[*idx] += power;
            }
            if (stop == std::string::npos)
                break;
            start = stop + 1;
        }
        result.add_term(e, coeff);
    }
    return result;
}

/// Monomial substitution x_i -> prod_j y_j^{M[i][j]} from a source context
/// to a target context; an exponent row vector e maps to e * M.
class MonomialMap {
public:
    MonomialMap(ContextPtr source, ContextPtr target, std::vector<std::vector<int>> matrix)
        : source_(std::move(source)), target_(std::move(target)), matrix_(std::move(matrix))
    {
        if (matrix_.size() != source_->size())
            throw ContextError("monomial map rows must match the source context");
        for (const auto &row : matrix_)
            if (row.size() != target_->size())
                throw ContextError("monomial map columns must match the target context");
    }

    static MonomialMap identity(ContextPtr source, ContextPtr target)
    {
        if (source->size() != target->size())
            throw ContextError("identity map needs equal dimensions");
        std::vector<std::vector<int>> m(source->size(), std::vector<int>(source->size(), 0));
        for (std::size_t i = 0; i < m.size(); ++i)
            m[i][i] = 1;
        return {std::move(source), std::move(target), std::move(m)};
    }

    const ContextPtr &source() const { return source_; }
    const ContextPtr &target() const { return target_; }
    const std::vector<std::vector<int>> &matrix() const { return matrix_; }

    Exponent apply(const Exponent &e) const
    {
        Exponent out(target_->size(), 0);
        for (std::size_t i = 0; i < e.size(); ++i)
            if (e[i] != 0)
                for (std::size_t j = 0; j < out.size(); ++j)
                    out[j] += e[i] * matrix_[i][j];
        return out;
    }

    /// First this, then `next`.
    MonomialMap then(const MonomialMap &next) const
    {
        if (!same_context(target_, next.source_))
            throw ContextError("cannot compose monomial maps with mismatched contexts");
        std::vector<std::vector<int>> m(source_->size(), std::vector<int>(next.target_->size(), 0));
        for (std::size_t i = 0; i < m.size(); ++i)
            for (std::size_t k = 0; k < matrix_[i].size(); ++k)
                for (std::size_t j = 0; j < m[i].size(); ++j)
                    m[i][j] += matrix_[i][k] * next.matrix_[k][j];
        return {source_, next.target_, std::move(m)};
    }

    Integer determinant() const
    {
        const auto n = matrix_.size();
        if (n != target_->size())
            throw ContextError("determinant of a non-square monomial map");
        // Fraction-free Bareiss elimination.
        std::vector<std::vector<Integer>> a(n, std::vector<Integer>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                a[i][j] = matrix_[i][j];
        Integer sign = 1, prev = 1;
        for (std::size_t k = 0; k < n; ++k) {
            if (a[k][k] == 0) {
                std::size_t p = k + 1;
                while (p < n && a[p][k] == 0)
                    ++p;
                if (p == n)
                    return 0;
                std::swap(a[k], a[p]);
                sign = -sign;
            }
            for (std::size_t i = k + 1; i < n; ++i)
                for (std::size_t j = k + 1; j < n; ++j)
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            prev = a[k][k];
        }
        return n == 0 ? Integer(1) : Integer(sign * a[n - 1][n - 1]);
    }

    /// Inverse map; requires determinant +-1.
    MonomialMap inverse() const
    {
        const auto det = determinant();
        if (det != 1 && det != -1)
            throw NotInvertibleError("monomial map is not unimodular", det.str());
        const auto n = matrix_.size();
        std::vector<std::vector<Rational>> a(n, std::vector<Rational>(2 * n, 0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j)
                a[i][j] = matrix_[i][j];
            a[i][n + i] = 1;
        }
        for (std::size_t c = 0; c < n; ++c) {
            std::size_t p = c;
            while (a[p][c] == 0)
                ++p;
            std::swap(a[p], a[c]);
            const Rational piv = a[c][c];
            for (auto &x : a[c])
                x /= piv;
            for (std::size_t r = 0; r < n; ++r)
                if (r != c && a[r][c] != 0) {
                    const Rational f = a[r][c];
                    for (std::size_t j = 0; j < 2 * n; ++j)
                        a[r][j] -= f * a[c][j];
                }
        }
        std::vector<std::vector<int>> inv(n, std::vector<int>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                inv[i][j] = static_cast<int>(numerator(a[i][n + j]).convert_to<long>());
        return {target_, source_, std::move(inv)};
    }

private:
    ContextPtr source_;
    ContextPtr target_;
    std::vector<std::vector<int>> matrix_;
};

inline LaurentPolynomial LaurentPolynomial::substitute(const MonomialMap &map) const
{
    if (!same_context(ctx_, map.source()))
        throw ContextError("substitution source context does not match the polynomial");
    LaurentPolynomial r(map.target());
    for (const auto &[e, c] : terms_)
        r.add_term(map.apply(e), c);
    return r;
}

/// True iff every exponent (restricted to the first two slots, the torus
/// coordinates) pairs nonnegatively with every generator.
inline bool is_regular_on_cone(const LaurentPolynomial &p, std::span<const LatticeVector> generators)
{
    for (const auto &[e, c] : p.terms()) {
        const Covector m{e.at(0), e.at(1)};
        for (const auto &v : generators)
            if (pairing(m, v) < 0)
                return false;
    }
    return true;
}

} // namespace tropmirror
