#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tropmirror/laurent.hpp"

namespace tropmirror {

/// Dense matrix over a Laurent ring.
class LaurentMatrix {
public:
    LaurentMatrix() = default;
    LaurentMatrix(ContextPtr ctx, std::size_t rows, std::size_t cols)
        : ctx_(std::move(ctx)), rows_(rows), cols_(cols), entries_(rows * cols, LaurentPolynomial(ctx_))
    {
    }

    static LaurentMatrix identity(ContextPtr ctx, std::size_t n)
    {
        LaurentMatrix m(ctx, n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = LaurentPolynomial::constant(ctx, 1);
        return m;
    }

    /// Integer matrix embedded as constants.
    static LaurentMatrix from_integers(ContextPtr ctx, const std::vector<std::vector<int>> &rows)
    {
        LaurentMatrix m(ctx, rows.size(), rows.empty() ? 0 : rows.front().size());
        for (std::size_t i = 0; i < m.rows_; ++i)
            for (std::size_t j = 0; j < m.cols_; ++j)
                m(i, j) = LaurentPolynomial::constant(ctx, rows[i].at(j));
        return m;
    }

    static LaurentMatrix parse(ContextPtr ctx, const std::vector<std::vector<std::string>> &rows)
    {
        LaurentMatrix m(ctx, rows.size(), rows.empty() ? 0 : rows.front().size());
        for (std::size_t i = 0; i < m.rows_; ++i) {
            if (rows[i].size() != m.cols_)
                throw std::invalid_argument("ragged matrix rows");
            for (std::size_t j = 0; j < m.cols_; ++j)
                m(i, j) = LaurentPolynomial::parse(ctx, rows[i][j]);
        }
        return m;
    }

    const ContextPtr &context() const { return ctx_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    LaurentPolynomial &operator()(std::size_t i, std::size_t j) { return entries_.at(i * cols_ + j); }
    const LaurentPolynomial &operator()(std::size_t i, std::size_t j) const { return entries_.at(i * cols_ + j); }

    friend LaurentMatrix operator*(const LaurentMatrix &a, const LaurentMatrix &b)
    {
        if (a.cols_ != b.rows_)
            throw std::invalid_argument("matrix dimensions do not match for product");
        if (!same_context(a.ctx_, b.ctx_))
            throw ContextError("matrices live in different variable contexts");
        LaurentMatrix r(a.ctx_, a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t j = 0; j < b.cols_; ++j)
                for (std::size_t k = 0; k < a.cols_; ++k) {
                    const auto &x = a(i, k);
                    const auto &y = b(k, j);
                    if (!x.is_zero() && !y.is_zero())
                        r(i, j) += x * y;
                }
        return r;
    }

    friend LaurentMatrix operator+(LaurentMatrix a, const LaurentMatrix &b)
    {
        a.check_shape(b);
        for (std::size_t k = 0; k < a.entries_.size(); ++k)
            a.entries_[k] += b.entries_[k];
        return a;
    }

    friend LaurentMatrix operator-(LaurentMatrix a, const LaurentMatrix &b)
    {
        a.check_shape(b);
        for (std::size_t k = 0; k < a.entries_.size(); ++k)
            a.entries_[k] -= b.entries_[k];
        return a;
    }

    friend LaurentMatrix operator-(const LaurentMatrix &a)
    {
        LaurentMatrix r = a;
        for (auto &e : r.entries_)
            e = -e;
        return r;
    }

    friend LaurentMatrix operator*(const LaurentPolynomial &s, const LaurentMatrix &a)
    {
        LaurentMatrix r = a;
        for (auto &e : r.entries_)
            e = s * e;
        return r;
    }

    bool operator==(const LaurentMatrix &o) const
    {
        return rows_ == o.rows_ && cols_ == o.cols_ && same_context(ctx_, o.ctx_) && entries_ == o.entries_;
    }

    bool is_identity() const { return rows_ == cols_ && *this == identity(ctx_, rows_); }
    bool is_zero() const
    {
        for (const auto &e : entries_)
            if (!e.is_zero())
                return false;
        return true;
    }

    LaurentPolynomial determinant() const
    {
        if (rows_ != cols_)
            throw std::invalid_argument("determinant of a non-square matrix");
        return det_rec(*this);
    }

    /// Inverse over the Laurent ring via the adjugate; the determinant must
    /// be a unit.
    LaurentMatrix inverse() const
    {
        const auto d = determinant();
        if (!d.is_monomial())
            throw NotInvertibleError("determinant is not a unit", d.to_string());
        const auto dinv = d.inverse();
        LaurentMatrix r(ctx_, rows_, cols_);
        if (rows_ == 1) {
            r(0, 0) = dinv;
            return r;
        }
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) {
                auto c = det_rec(minor(j, i));
                if ((i + j) % 2)
                    c = -c;
                r(i, j) = dinv * c;
            }
        return r;
    }

    LaurentMatrix transform(const auto &fn) const
    {
        LaurentMatrix r = *this;
        for (auto &e : r.entries_)
            e = fn(e);
        if (!r.entries_.empty())
            r.ctx_ = r.entries_.front().context();
        return r;
    }

    LaurentMatrix substitute(const MonomialMap &map) const
    {
        LaurentMatrix r(map.target(), rows_, cols_);
        for (std::size_t k = 0; k < entries_.size(); ++k)
            r.entries_[k] = entries_[k].substitute(map);
        return r;
    }

    LaurentMatrix substitute_variable(std::size_t var, const LaurentPolynomial &q) const
    {
        LaurentMatrix r = *this;
        for (auto &e : r.entries_)
            e = e.substitute_variable(var, q);
        return r;
    }

    std::vector<std::vector<std::string>> to_strings() const
    {
        std::vector<std::vector<std::string>> out(rows_, std::vector<std::string>(cols_));
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                out[i][j] = (*this)(i, j).to_string();
        return out;
    }

    nlohmann::json to_json() const { return to_strings(); }

    std::string to_string() const { return to_json().dump(); }

private:
    void check_shape(const LaurentMatrix &o) const
    {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument("matrix shapes differ");
        if (!same_context(ctx_, o.ctx_))
            throw ContextError("matrices live in different variable contexts");
    }

    LaurentMatrix minor(std::size_t skip_r, std::size_t skip_c) const
    {
        LaurentMatrix m(ctx_, rows_ - 1, cols_ - 1);
        for (std::size_t i = 0, ri = 0; i < rows_; ++i) {
            if (i == skip_r)
                continue;
            for (std::size_t j = 0, cj = 0; j < cols_; ++j) {
                if (j == skip_c)
                    continue;
                m(ri, cj++) = (*this)(i, j);
            }
            ++ri;
        }
        return m;
    }

    static LaurentPolynomial det_rec(const LaurentMatrix &m)
    {
        const auto n = m.rows_;
        if (n == 0)
            return LaurentPolynomial::constant(m.ctx_, 1);
        if (n == 1)
            return m(0, 0);
        if (n == 2)
            return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        LaurentPolynomial d(m.ctx_);
        for (std::size_t j = 0; j < n; ++j) {
            if (m(0, j).is_zero())
                continue;
            auto t = m(0, j) * det_rec(m.minor(0, j));
            if (j % 2)
                d -= t;
            else
                d += t;
        }
        return d;
    }

    ContextPtr ctx_;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<LaurentPolynomial> entries_;
};

inline std::ostream &operator<<(std::ostream &os, const LaurentMatrix &m) { return os << m.to_string(); }

/// The 2x2 rotation [[0,-1],[1,0]].
inline LaurentMatrix rotation_j(ContextPtr ctx) { return LaurentMatrix::from_integers(ctx, {{0, -1}, {1, 0}}); }

} // namespace tropmirror
