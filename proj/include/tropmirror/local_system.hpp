#pragma once

// Sign-valued local systems on the double cover of the punctured plane and
// their rank-2 pushforwards.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tropmirror/laurent_matrix.hpp"

namespace tropmirror {

/// The base minus the origin is covered by V_1, V_2 (slit along v_2, v_1);
/// V_1 cap V_2 is two sectors. Over the sector where the sheets match, the
/// components are V_1^+ cap V_2^+ and V_1^- cap V_2^-; over the other one they
/// are V_1^+ cap V_2^- and V_1^- cap V_2^+. One sign per component.
struct LocalSystem {
    int pp = 1; // V_1^+ cap V_2^+
    int pm = 1; // V_1^+ cap V_2^-
    int mp = 1; // V_1^- cap V_2^+
    int mm = 1; // V_1^- cap V_2^-

    /// Holonomy -1 system whose crossing matrix is J.
    static LocalSystem standard() { return {1, -1, 1, 1}; }
    /// All signs of standard() reversed; crossing matrix -J.
    static LocalSystem sign_flipped() { return {-1, 1, -1, -1}; }
    /// Signs 1, -1, -1, 1 in the component order above.
    static LocalSystem symmetric_table() { return {1, -1, -1, 1}; }
    static LocalSystem trivial() { return {1, 1, 1, 1}; }

    void validate() const
    {
        for (int s : {pp, pm, mp, mm})
            if (s != 1 && s != -1)
                throw std::invalid_argument("local system signs must be +1 or -1");
    }

    /// Product of the transition signs met along one loop on the cover.
    int holonomy() const
    {
        validate();
        return pp * pm * mp * mm;
    }

    /// Pushforward transition on the sector where the sheets match.
    std::vector<std::vector<int>> same_sector() const { return {{pp, 0}, {0, mm}}; }
    /// Pushforward transition on the sector where the sheets swap.
    std::vector<std::vector<int>> cross_sector() const { return {{0, pm}, {mp, 0}}; }

    LaurentMatrix pushforward_monodromy(const ContextPtr &ctx) const
    {
        validate();
        return LaurentMatrix::from_integers(ctx, cross_sector()) * LaurentMatrix::from_integers(ctx, same_sector());
    }

    /// Matrix inserted into the gluing: the crossing matrix when the system
    /// is twisted, nothing otherwise.
    std::optional<LaurentMatrix> insertion(const ContextPtr &ctx) const
    {
        if (holonomy() == 1)
            return std::nullopt;
        return LaurentMatrix::from_integers(ctx, cross_sector());
    }

    std::string str() const
    {
        return "(" + std::to_string(pp) + "," + std::to_string(pm) + "," + std::to_string(mp) + "," +
               std::to_string(mm) + ")";
    }
};

} // namespace tropmirror
