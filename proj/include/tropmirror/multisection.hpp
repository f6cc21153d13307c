#pragma once

// Branched covers of a fan carrying a multi-valued PL function.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tropmirror/fan.hpp"

namespace tropmirror {

struct SheetedCone {
    std::size_t base_cone = 0;
    std::string label;
    Covector slope;
    Rational offset = 0;
};

struct GluingEdge {
    std::size_t ray = 0; // index into the base fan's rays
    std::size_t sheet_a = 0;
    std::size_t sheet_b = 0;
};

class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CheckResult {
    std::string name;
    bool pass = true;
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckResult> checks;

    bool ok() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult &c) { return c.pass; });
    }
    std::vector<CheckResult> failures() const
    {
        std::vector<CheckResult> out;
        for (const auto &c : checks)
            if (!c.pass)
                out.push_back(c);
        return out;
    }
};

/// Permutation of the sheets over one base cone, by label.
struct SheetPermutation {
    std::map<std::string, std::string> mapping;

    bool is_identity() const
    {
        return std::all_of(mapping.begin(), mapping.end(), [](const auto &kv) { return kv.first == kv.second; });
    }
    std::size_t order() const
    {
        std::size_t n = 1;
        auto cur = mapping;
        while (!std::all_of(cur.begin(), cur.end(), [](const auto &kv) { return kv.first == kv.second; })) {
            for (auto &[k, v] : cur)
                v = mapping.at(v);
            ++n;
            if (n > mapping.size() + 1)
                throw StructuralError("sheet map is not a permutation");
        }
        return n;
    }
    bool is_transposition() const
    {
        std::size_t moved = 0;
        for (const auto &[k, v] : mapping)
            moved += k != v;
        return moved == 2 && order() == 2;
    }
};

class TropicalMultiSection {
public:
    Fan base;
    std::vector<SheetedCone> sheets;
    std::vector<GluingEdge> gluings;
    std::vector<LatticeVector> branch_points{{0, 0}};

    std::string sheet_name(std::size_t s) const
    {
        return "s" + std::to_string(sheets.at(s).base_cone) + sheets.at(s).label;
    }

    std::vector<std::size_t> sheets_over(std::size_t cone) const
    {
        std::vector<std::size_t> out;
        for (std::size_t s = 0; s < sheets.size(); ++s)
            if (sheets[s].base_cone == cone)
                out.push_back(s);
        std::sort(out.begin(), out.end(), [&](auto a, auto b) { return sheets[a].label < sheets[b].label; });
        return out;
    }

    std::optional<std::size_t> find_sheet(std::size_t cone, const std::string &label) const
    {
        for (std::size_t s = 0; s < sheets.size(); ++s)
            if (sheets[s].base_cone == cone && sheets[s].label == label)
                return s;
        return std::nullopt;
    }

    std::size_t sheet(std::size_t cone, const std::string &label) const
    {
        const auto s = find_sheet(cone, label);
        if (!s)
            throw StructuralError("no sheet '" + label + "' over cone " + std::to_string(cone));
        return *s;
    }

    /// Sheet count over cone 0; validate() checks that it is constant.
    std::size_t degree() const { return base.num_cones() ? sheets_over(0).size() : 0; }

    /// The sheet glued to `s` across `ray`, if any.
    std::optional<std::size_t> partner(std::size_t s, std::size_t ray) const
    {
        for (const auto &g : gluings) {
            if (g.ray != ray)
                continue;
            if (g.sheet_a == s)
                return g.sheet_b;
            if (g.sheet_b == s)
                return g.sheet_a;
        }
        return std::nullopt;
    }

    bool glued(std::size_t a, std::size_t b, std::size_t ray) const { return partner(a, ray) == b; }

    nlohmann::json to_json() const
    {
        nlohmann::json j;
        j["fan"] = base.to_json();
        j["sheets"] = nlohmann::json::array();
        for (const auto &s : sheets)
            j["sheets"].push_back(
                {{"cone", s.base_cone}, {"label", s.label}, {"slope", {s.slope.x, s.slope.y}}, {"offset", s.offset.str()}});
        j["gluings"] = nlohmann::json::array();
        for (const auto &g : gluings)
            j["gluings"].push_back({{"ray", g.ray},
                                    {"a", {sheets[g.sheet_a].base_cone, sheets[g.sheet_a].label}},
                                    {"b", {sheets[g.sheet_b].base_cone, sheets[g.sheet_b].label}}});
        return j;
    }

    static TropicalMultiSection from_json(const nlohmann::json &j)
    {
        TropicalMultiSection ms;
        ms.base = Fan::from_json(j.at("fan"));
        for (const auto &s : j.at("sheets")) {
            SheetedCone sc;
            sc.base_cone = s.at("cone").get<std::size_t>();
            if (sc.base_cone >= ms.base.num_cones())
                throw StructuralError("sheet over a missing cone");
            sc.label = s.at("label").get<std::string>();
            const auto &m = s.at("slope");
            for (const auto &c : m)
                if (!c.is_number_integer())
                    throw std::invalid_argument("sheet slopes must be integral");
            sc.slope = {m.at(0).get<std::int64_t>(), m.at(1).get<std::int64_t>()};
            if (s.contains("offset"))
                sc.offset = s.at("offset").is_string() ? parse_rational(s.at("offset").get<std::string>())
                                                       : Rational(s.at("offset").get<std::int64_t>());
            ms.sheets.push_back(sc);
        }
        for (const auto &g : j.at("gluings")) {
            const auto ref = [&](const nlohmann::json &r) {
                return ms.sheet(r.at(0).get<std::size_t>(), r.at(1).get<std::string>());
            };
            ms.gluings.push_back({g.at("ray").get<std::size_t>(), ref(g.at("a")), ref(g.at("b"))});
        }
        return ms;
    }
};

namespace detail {
inline void glue(TropicalMultiSection &ms, std::size_t ray, std::size_t ca, const std::string &la, std::size_t cb,
                 const std::string &lb)
{
    ms.gluings.push_back({ray, ms.sheet(ca, la), ms.sheet(cb, lb)});
}
} // namespace detail

/// The degree-2 cover whose sheets carry 0, 2x, x, y, 2y, with trace O(3D_0).
inline TropicalMultiSection build_L()
{
    TropicalMultiSection ms;
    ms.base = build_p2_fan();
    ms.sheets = {
        {0, "+", {0, 0}, 0}, {0, "-", {0, 0}, 0}, {1, "+", {2, 0}, 0},
        {1, "-", {1, 0}, 0}, {2, "+", {0, 1}, 0}, {2, "-", {0, 2}, 0},
    };
    using detail::glue;
    glue(ms, 0, 1, "+", 2, "-");
    glue(ms, 0, 1, "-", 2, "+");
    glue(ms, 2, 0, "+", 1, "-");
    glue(ms, 2, 0, "-", 1, "+");
    glue(ms, 1, 0, "+", 2, "-");
    glue(ms, 1, 0, "-", 2, "+");
    return ms;
}

/// Sheets sigma_{ki} over cone k, one per other index i; sigma_ij ~ sigma_ji
/// and sigma_ik ~ sigma_jk along v_k.
inline TropicalMultiSection build_Lprime()
{
    TropicalMultiSection ms;
    ms.base = build_p2_fan();
    ms.sheets = {
        {0, "01", {-1, 0}, 0}, {0, "02", {0, -1}, 0}, {1, "10", {1, 0}, 0},
        {1, "12", {1, -1}, 0}, {2, "20", {0, 1}, 0},  {2, "21", {-1, 1}, 0},
    };
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j) {
            const std::size_t k = 3 - i - j;
            const auto lab = [](std::size_t a, std::size_t b) { return std::to_string(a) + std::to_string(b); };
            detail::glue(ms, k, i, lab(i, j), j, lab(j, i));
            detail::glue(ms, k, i, lab(i, k), j, lab(j, k));
        }
    return ms;
}

/// r copies of a single PL function, glued identically.
inline TropicalMultiSection trivial_cover(const PLFunction &f, std::size_t r)
{
    TropicalMultiSection ms;
    ms.base = f.fan;
    for (std::size_t c = 0; c < f.fan.num_cones(); ++c)
        for (std::size_t k = 0; k < r; ++k)
            ms.sheets.push_back({c, std::to_string(k), f.slopes[c], f.offsets[c]});
    for (std::size_t a = 0; a < f.fan.num_cones(); ++a)
        for (std::size_t b = a + 1; b < f.fan.num_cones(); ++b)
            if (const auto ray = f.fan.shared_ray(a, b))
                for (std::size_t k = 0; k < r; ++k)
                    detail::glue(ms, *ray, a, std::to_string(k), b, std::to_string(k));
    return ms;
}

inline ValidationReport validate(const TropicalMultiSection &ms)
{
    ValidationReport rep;
    const auto &fan = ms.base;

    for (std::size_t e = 0; e < ms.gluings.size(); ++e) {
        const auto &g = ms.gluings[e];
        CheckResult c{"continuity " + ms.sheet_name(g.sheet_a) + "~" + ms.sheet_name(g.sheet_b) + " along ray " +
                          std::to_string(g.ray),
                      true,
                      {}};
        const auto &sa = ms.sheets.at(g.sheet_a);
        const auto &sb = ms.sheets.at(g.sheet_b);
        if (g.ray >= fan.rays().size() || !fan.cone_has_ray(sa.base_cone, g.ray) ||
            !fan.cone_has_ray(sb.base_cone, g.ray) || sa.base_cone == sb.base_cone) {
            c.pass = false;
            c.detail = "sheets are not over cones adjacent across this ray";
        } else {
            const auto &v = fan.rays()[g.ray];
            const Rational va = Rational(pairing(sa.slope, v)) + sa.offset;
            const Rational vb = Rational(pairing(sb.slope, v)) + sb.offset;
            if (va != vb) {
                c.pass = false;
                c.detail = "values at " + v.str() + ": " + va.str() + " vs " + vb.str();
            }
        }
        rep.checks.push_back(c);
    }

    {
        // Slopes are stored as lattice points; this records the count checked.
        rep.checks.push_back({"integral slopes", true, std::to_string(ms.sheets.size()) + " sheets"});
    }

    const auto r = ms.degree();
    for (std::size_t cone = 0; cone < fan.num_cones(); ++cone) {
        const auto n = ms.sheets_over(cone).size();
        rep.checks.push_back({"degree over cone " + std::to_string(cone), n == r && r > 0,
                              std::to_string(n) + " sheets, expected " + std::to_string(r)});
    }
    for (std::size_t ray = 0; ray < fan.rays().size(); ++ray) {
        CheckResult c{"covering over ray " + std::to_string(ray), true, {}};
        std::size_t edges = 0;
        for (const auto &g : ms.gluings)
            edges += g.ray == ray;
        for (auto cone : fan.cones_containing_ray(ray))
            for (auto s : ms.sheets_over(cone)) {
                std::size_t hits = 0;
                for (const auto &g : ms.gluings)
                    hits += g.ray == ray && (g.sheet_a == s || g.sheet_b == s);
                if (hits != 1) {
                    c.pass = false;
                    c.detail = ms.sheet_name(s) + " appears in " + std::to_string(hits) + " gluings";
                }
            }
        if (c.pass && edges != r) {
            c.pass = false;
            c.detail = std::to_string(edges) + " sheet-rays, expected " + std::to_string(r);
        }
        if (c.pass)
            c.detail = "degree " + std::to_string(edges);
        rep.checks.push_back(c);
    }

    {
        const bool at_origin = std::all_of(ms.branch_points.begin(), ms.branch_points.end(),
                                           [](const LatticeVector &p) { return p.is_zero(); });
        rep.checks.push_back({"branch locus codimension 2", at_origin,
                              std::to_string(ms.branch_points.size()) + " branch point(s)"});
    }
    return rep;
}

/// Sheet permutation from walking once counterclockwise around the origin,
/// starting and ending over `base_cone`.
inline SheetPermutation monodromy(const TropicalMultiSection &ms, std::size_t base_cone)
{
    const auto order = ms.base.cyclic_order(base_cone);
    SheetPermutation perm;
    for (auto s0 : ms.sheets_over(base_cone)) {
        std::size_t s = s0;
        for (std::size_t k = 0; k < order.size(); ++k) {
            const auto from = order[k];
            const auto to = order[(k + 1) % order.size()];
            const auto ray = ms.base.shared_ray(from, to);
            if (!ray)
                throw StructuralError("consecutive cones " + std::to_string(from) + "," + std::to_string(to) +
                                      " share no ray");
            const auto next = ms.partner(s, *ray);
            if (!next || ms.sheets[*next].base_cone != to)
                throw StructuralError("no sheet over cone " + std::to_string(to) + " matches " + ms.sheet_name(s));
            s = *next;
        }
        perm.mapping[ms.sheets[s0].label] = ms.sheets[s].label;
    }
    return perm;
}

/// Base PL function whose slope on each cone is the sum of the sheet slopes.
inline PLFunction trace_pl(const TropicalMultiSection &ms)
{
    PLFunction f{ms.base, {}, {}};
    for (std::size_t c = 0; c < ms.base.num_cones(); ++c) {
        Covector m;
        Rational b = 0;
        for (auto s : ms.sheets_over(c)) {
            m = m + ms.sheets[s].slope;
            b += ms.sheets[s].offset;
        }
        f.slopes.push_back(m);
        f.offsets.push_back(b);
    }
    return f;
}

struct SheetDifference {
    std::size_t sheet_a = 0;
    std::size_t sheet_b = 0;
    Covector slope;
    Rational offset = 0;
};

struct Comparison {
    std::vector<SheetDifference> differences;
    bool continuous = true; // differences agree across every gluing of a
    std::vector<Covector> distinct_slopes;
};

/// phi_a - phi_b sheetwise. `match` pairs a-sheets with b-sheets and must
/// carry a's gluings onto b's gluings.
inline Comparison compare_multisections(const TropicalMultiSection &a, const TropicalMultiSection &b,
                                        const std::vector<std::pair<std::size_t, std::size_t>> &match)
{
    if (!(a.base == b.base))
        throw StructuralError("multi-sections live over different fans");
    if (a.degree() != b.degree())
        throw StructuralError("multi-sections have different degrees");
    std::map<std::size_t, std::size_t> to_b;
    std::map<std::size_t, std::size_t> from_b;
    for (const auto &[sa, sb] : match) {
        if (a.sheets.at(sa).base_cone != b.sheets.at(sb).base_cone)
            throw StructuralError("matched sheets lie over different cones");
        if (!to_b.emplace(sa, sb).second || !from_b.emplace(sb, sa).second)
            throw StructuralError("sheet matching is not a bijection");
    }
    if (to_b.size() != a.sheets.size() || from_b.size() != b.sheets.size())
        throw StructuralError("sheet matching does not cover every sheet");
    for (const auto &g : a.gluings)
        if (!b.glued(to_b.at(g.sheet_a), to_b.at(g.sheet_b), g.ray))
            throw StructuralError("sheet matching breaks the gluing " + a.sheet_name(g.sheet_a) + "~" +
                                  a.sheet_name(g.sheet_b));

    Comparison cmp;
    std::map<std::size_t, std::size_t> index;
    for (std::size_t sa = 0; sa < a.sheets.size(); ++sa) {
        const auto sb = to_b.at(sa);
        index[sa] = cmp.differences.size();
        SheetDifference d{sa, sb, a.sheets[sa].slope - b.sheets[sb].slope, a.sheets[sa].offset - b.sheets[sb].offset};
        cmp.differences.push_back(d);
        if (std::find(cmp.distinct_slopes.begin(), cmp.distinct_slopes.end(), d.slope) == cmp.distinct_slopes.end())
            cmp.distinct_slopes.push_back(d.slope);
    }
    std::sort(cmp.distinct_slopes.begin(), cmp.distinct_slopes.end());
    for (const auto &g : a.gluings) {
        const auto &v = a.base.rays()[g.ray];
        const auto &da = cmp.differences[index[g.sheet_a]];
        const auto &db = cmp.differences[index[g.sheet_b]];
        if (Rational(pairing(da.slope, v)) + da.offset != Rational(pairing(db.slope, v)) + db.offset)
            cmp.continuous = false;
    }
    return cmp;
}

/// Sheet matching of L with L' used for the difference phi - phi'.
inline std::vector<std::pair<std::size_t, std::size_t>> standard_L_Lprime_match(const TropicalMultiSection &l,
                                                                               const TropicalMultiSection &lp)
{
    return {
        {l.sheet(0, "+"), lp.sheet(0, "02")}, {l.sheet(0, "-"), lp.sheet(0, "01")},
        {l.sheet(1, "+"), lp.sheet(1, "10")}, {l.sheet(1, "-"), lp.sheet(1, "12")},
        {l.sheet(2, "+"), lp.sheet(2, "21")}, {l.sheet(2, "-"), lp.sheet(2, "20")},
    };
}

} // namespace tropmirror
