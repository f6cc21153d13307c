#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "tropmirror/laurent.hpp"

namespace tropmirror {

/// Sparse row: column -> coefficient.
using SparseRow = std::map<std::size_t, Rational>;

/// Basis of {x : A x = 0} over Q via reduced row echelon form.
inline std::vector<std::vector<Rational>> rational_nullspace(std::vector<SparseRow> rows, std::size_t ncols)
{
    std::vector<std::size_t> pivot_col;
    std::vector<SparseRow> reduced;
    for (auto &row : rows) {
        // reduce against existing pivots
        for (std::size_t p = 0; p < reduced.size(); ++p) {
            const auto it = row.find(pivot_col[p]);
            if (it == row.end())
                continue;
            const Rational f = it->second;
            for (const auto &[c, v] : reduced[p]) {
                auto [jt, inserted] = row.try_emplace(c, 0);
                jt->second -= f * v;
                if (jt->second == 0)
                    row.erase(jt);
            }
        }
        if (row.empty())
            continue;
        const auto pc = row.begin()->first;
        const Rational lead = row.begin()->second;
        for (auto &[c, v] : row)
            v /= lead;
        // keep earlier rows fully reduced
        for (auto &prev : reduced) {
            const auto it = prev.find(pc);
            if (it == prev.end())
                continue;
            const Rational f = it->second;
            for (const auto &[c, v] : row) {
                auto [jt, inserted] = prev.try_emplace(c, 0);
                jt->second -= f * v;
                if (jt->second == 0)
                    prev.erase(jt);
            }
        }
        reduced.push_back(std::move(row));
        pivot_col.push_back(pc);
    }
    std::vector<bool> is_pivot(ncols, false);
    for (auto c : pivot_col)
        is_pivot[c] = true;
    std::vector<std::vector<Rational>> basis;
    for (std::size_t free = 0; free < ncols; ++free) {
        if (is_pivot[free])
            continue;
        std::vector<Rational> v(ncols, 0);
        v[free] = 1;
        for (std::size_t p = 0; p < reduced.size(); ++p) {
            const auto it = reduced[p].find(free);
            if (it != reduced[p].end())
                v[pivot_col[p]] = -it->second;
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Rank of a dense rational matrix.
inline std::size_t rational_rank(std::vector<std::vector<Rational>> a)
{
    std::size_t rank = 0;
    const std::size_t ncols = a.empty() ? 0 : a.front().size();
    for (std::size_t c = 0; c < ncols && rank < a.size(); ++c) {
        std::size_t p = rank;
        while (p < a.size() && a[p][c] == 0)
            ++p;
        if (p == a.size())
            continue;
        std::swap(a[p], a[rank]);
        for (std::size_t r = rank + 1; r < a.size(); ++r) {
            if (a[r][c] == 0)
                continue;
            const Rational f = a[r][c] / a[rank][c];
            for (std::size_t k = c; k < ncols; ++k)
                a[r][k] -= f * a[rank][k];
        }
        ++rank;
    }
    return rank;
}

} // namespace tropmirror
