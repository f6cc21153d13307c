#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>

namespace tropmirror {

/// Integral point of a rank-2 lattice. Used both for N (ray generators) and
/// for the dual lattice M (slopes, monomial exponents, frame weights); the
/// pairing below is the standard one.
struct LatticeVector {
    std::int64_t x = 0;
    std::int64_t y = 0;

    constexpr LatticeVector() = default;
    constexpr LatticeVector(std::int64_t a, std::int64_t b) : x(a), y(b) {}

    constexpr std::int64_t operator[](std::size_t i) const { return i == 0 ? x : y; }

    constexpr LatticeVector operator+(const LatticeVector &o) const { return {x + o.x, y + o.y}; }
    constexpr LatticeVector operator-(const LatticeVector &o) const { return {x - o.x, y - o.y}; }
    constexpr LatticeVector operator-() const { return {-x, -y}; }
    constexpr LatticeVector operator*(std::int64_t k) const { return {k * x, k * y}; }

    constexpr bool is_zero() const { return x == 0 && y == 0; }
    bool is_primitive() const { return std::gcd(x, y) == 1; }

    auto operator<=>(const LatticeVector &) const = default;

    std::string str() const { return "(" + std::to_string(x) + "," + std::to_string(y) + ")"; }
};

using Covector = LatticeVector;

constexpr std::int64_t pairing(const Covector &m, const LatticeVector &v) { return m.x * v.x + m.y * v.y; }

/// det of the 2x2 matrix with rows a, b.
constexpr std::int64_t det2(const LatticeVector &a, const LatticeVector &b) { return a.x * b.y - a.y * b.x; }

inline LatticeVector primitive(const LatticeVector &v)
{
    const auto g = std::gcd(v.x, v.y);
    return g == 0 ? v : LatticeVector{v.x / g, v.y / g};
}

inline std::ostream &operator<<(std::ostream &os, const LatticeVector &v) { return os << v.str(); }

} // namespace tropmirror
