#pragma once

// One function per CLI command; each returns a Report. Parsing of the
// command line lives in tools/.

#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tropmirror/caustic.hpp"
#include "tropmirror/finite_difference.hpp"
#include "tropmirror/models.hpp"
#include "tropmirror/report.hpp"
#include "tropmirror/tropicalizer.hpp"

namespace tropmirror {

/// Bad input: unparsable values, violated constraint. Maps to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct RunConfig {
    std::optional<std::string> constants;
    bool parametric = false;
    bool no_twist = false;
    bool solve_b2 = false;
    std::uint64_t seed = 7;
    std::size_t trials = 200;
    int bound = 3;
    std::string grid = "regions";
    std::vector<double> hbars{0.1, 0.05, 0.025, 0.0125};
    double tol = 1e-6;
    std::string cocycle; // verify-tangent: JSON fixture instead of the built-in matrices

    nlohmann::json to_json() const
    {
        nlohmann::json j{{"parametric", parametric}, {"no_twist", no_twist}, {"solve_b2", solve_b2},
                         {"seed", seed},             {"trials", trials},     {"bound", bound},
                         {"grid", grid},             {"hbar", hbars},        {"tol", tol}};
        j["constants"] = constants ? nlohmann::json(*constants) : nlohmann::json(nullptr);
        if (!cocycle.empty())
            j["cocycle"] = cocycle;
        return j;
    }

    /// Overwrites the fields present in j.
    void merge_json(const nlohmann::json &j)
    {
        try {
            if (j.contains("constants") && !j["constants"].is_null())
                constants = j["constants"].get<std::string>();
            parametric = j.value("parametric", parametric);
            no_twist = j.value("no_twist", no_twist);
            solve_b2 = j.value("solve_b2", solve_b2);
            seed = j.value("seed", seed);
            trials = j.value("trials", trials);
            bound = j.value("bound", bound);
            grid = j.value("grid", grid);
            hbars = j.value("hbar", hbars);
            tol = j.value("tol", tol);
            cocycle = j.value("cocycle", cocycle);
        } catch (const nlohmann::json::exception &e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    }

    void validate() const
    {
        if (constants && parametric)
            throw ConfigError("--constants and --parametric are exclusive");
        if (bound < 1 || bound > 8)
            throw ConfigError("bound must be in [1, 8]");
        if (!(tol > 0))
            throw ConfigError("tol must be positive");
        if (hbars.size() < 2)
            throw ConfigError("need at least two hbar values");
        for (std::size_t i = 0; i < hbars.size(); ++i)
            if (!(hbars[i] > 0) || (i > 0 && !(hbars[i] < hbars[i - 1])))
                throw ConfigError("hbar values must be positive and strictly decreasing");
    }
};

inline nlohmann::json load_json_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(path + ": " + e.what());
    }
}

/// Constants from the config; `fallback` when none were given. Instantiated
/// constants must satisfy prod a_i b_i = -1 unless solve_b2 is set, in which
/// case b2 is replaced and a note is added.
inline Constants resolve_constants(const RunConfig &cfg, Report &rep, const Constants &fallback)
{
    if (cfg.parametric)
        return Constants::parametric();
    if (!cfg.constants)
        return fallback;
    std::array<Rational, 6> v;
    try {
        v = parse_constants(*cfg.constants);
    } catch (const std::exception &e) {
        throw ConfigError(std::string("constants: ") + e.what());
    }
    for (std::size_t k = 0; k < 6; ++k)
        if (v[k] == 0)
            throw ConfigError(std::string("constant ") + Constants::names[k] + " must be nonzero");
    Rational prod = 1;
    for (const auto &x : v)
        prod *= x;
    if (prod != -1) {
        if (!cfg.solve_b2)
            throw ConfigError("constants violate prod a_i b_i = -1 (product is " + prod.str() + ")");
        v[5] = -1 / (v[0] * v[1] * v[2] * v[3] * v[4]);
        rep.note("warning: b2 replaced by " + v[5].str() + " to satisfy prod a_i b_i = -1");
    }
    return Constants::instantiated(v);
}

/// Tangent-framed cocycle from {"transitions": {"10": [[...]], ...}}, entries
/// written in the source chart's variables.
inline TransitionCocycle cocycle_from_json(const nlohmann::json &j, const Atlas &atlas)
{
    TransitionCocycle c(atlas, tangent_frames(atlas), j.value("name", std::string("fixture")));
    try {
        for (const auto &[key, m] : j.at("transitions").items()) {
            if (key.size() != 2 || key[0] < '0' || key[0] > '2' || key[1] < '0' || key[1] > '2')
                throw ConfigError("bad overlap key '" + key + "'");
            const std::size_t i = key[0] - '0', jj = key[1] - '0';
            c.set(i, jj, LaurentMatrix::parse(atlas.chart(jj), m.get<std::vector<std::vector<std::string>>>()));
        }
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("cocycle fixture: ") + e.what());
    }
    return c;
}

inline void add_validation(Report &rep, const std::string &prefix, const ValidationReport &v)
{
    for (const auto &c : v.checks)
        rep.check(prefix + c.name, c.pass, c.pass || c.detail.empty() ? nlohmann::json(nullptr) : nlohmann::json(c.detail));
}

inline PLFunction o3_function(const Fan &fan) { return pl_from_ray_values(fan, std::vector<std::int64_t>{3, 0, 0}); }

// ---------------------------------------------------------------------------

inline Report cmd_verify_tangent(const RunConfig &cfg)
{
    Report rep("verify-tangent");
    rep.config = cfg.to_json();
    const Atlas atlas;
    const auto tangent = cfg.cocycle.empty() ? reference_tangent_cocycle(atlas)
                                             : cocycle_from_json(load_json_file(cfg.cocycle), atlas);
    rep.data["cocycle"] = tangent.to_json();

    const auto defect = cocycle_defect(tangent, standard_loop());
    rep.check("loop 0->1->2->0 closes to the identity", defect.is_identity(), defect.to_json());

    const auto jac = jacobian_cocycle(atlas);
    for (const auto &o : standard_overlaps()) {
        const bool present = tangent.has(o.first, o.second);
        const auto diff = present ? tangent.in_torus(o.first, o.second) - jac.in_torus(o.first, o.second)
                                  : LaurentMatrix(atlas.torus(), 2, 2);
        rep.check("transition " + overlap_name(o) + " equals the Jacobian of the chart change", present && diff.is_zero(),
                  present ? diff.to_json() : nlohmann::json("missing"));
    }
    add_validation(rep, "", regularity_check(tangent));
    add_validation(rep, "", equivariance_check(tangent));

    const auto cmp = compare_determinant(tangent, line_bundle_cocycle(o3_function(atlas.fan()), atlas));
    nlohmann::json ratios = nlohmann::json::array();
    for (const auto &r : cmp.ratios)
        ratios.push_back(r.to_string());
    rep.check("determinant differs from O(3D_0) by constants", cmp.ratios_constant, ratios);
    rep.check("determinant constants multiply to 1 around the loop", cmp.loop_product.to_string() == "1",
              cmp.loop_product.to_string());
    return rep;
}

// ---------------------------------------------------------------------------

namespace detail {
inline std::vector<Rational> random_params(std::mt19937_64 &rng, std::size_t n)
{
    std::uniform_int_distribution<int> num(1, 9);
    std::uniform_int_distribution<int> sign(0, 1);
    std::vector<Rational> v;
    for (std::size_t k = 0; k < n; ++k) {
        Rational x(num(rng), num(rng));
        v.push_back(sign(rng) ? -x : x);
    }
    return v;
}

inline bool wall_factor_in_search(const UnipotentSearch &s, const FactorMap &factors, const Atlas &atlas)
{
    for (const auto &sol : s.solutions) {
        bool all = sol.complete();
        for (std::size_t k = 0; k < 3 && all; ++k) {
            const auto &o = sol.overlaps[k];
            const auto &f = factors.at(o);
            const auto &tt = atlas.to_torus(o.second);
            all = correction_exponent(f, tt) == sol.torus_exponents[k] &&
                  correction_coefficient(f, tt).to_string() == sol.values[k]->to_string();
        }
        if (all)
            return true;
    }
    return false;
}

inline nlohmann::json search_json(const UnipotentSearch &s)
{
    nlohmann::json j{{"bound", s.bound},
                     {"candidates", s.candidates},
                     {"inconsistent", s.inconsistent},
                     {"undetermined", s.undetermined}};
    j["solutions"] = nlohmann::json::array();
    for (const auto &sol : s.solutions) {
        nlohmann::json e = nlohmann::json::array();
        for (std::size_t k = 0; k < 3; ++k)
            e.push_back({{"overlap", overlap_name(sol.overlaps[k])},
                         {"exponent", {sol.torus_exponents[k].x, sol.torus_exponents[k].y}},
                         {"coefficient", sol.coefficients[k]}});
        j["solutions"].push_back(e);
    }
    return j;
}
} // namespace detail

inline Report cmd_reconstruct(const RunConfig &cfg)
{
    cfg.validate();
    Report rep("reconstruct");
    rep.config = cfg.to_json();
    const auto constants = resolve_constants(cfg, rep, Constants::parametric());
    rep.data["constants"] = constants.describe();
    const std::optional<LocalSystem> twist =
        cfg.no_twist ? std::nullopt : std::optional<LocalSystem>(LocalSystem::standard());
    rep.data["local_system"] = twist ? twist->str() : "none";

    const auto m = model_L(constants);
    const auto naive = cocycle_defect(m.semiflat, standard_loop());
    const auto expected = expected_naive_defect(constants, m.atlas);
    rep.check("naive defect is [[0, b0 b1 b2], [a0 a1 a2, 0]]", naive == expected,
              {{"defect", naive.to_json()}, {"expected", expected.to_json()}});

    const auto factors = standard_wall_factors(constants, m.atlas);
    const auto corrected = corrected_cocycle(m.semiflat, factors, twist);
    const auto defect = cocycle_defect(corrected, standard_loop());
    nlohmann::json w{{"defect", defect.to_json()}};
    if (!twist)
        w["naive_defect"] = naive.to_json();
    rep.check(std::string("corrected gluing closes") + (twist ? " with the J twist" : " without a twist"),
              defect.is_identity(), w);

    const auto cmp = compare_determinant(corrected, line_bundle_cocycle(o3_function(m.atlas.fan()), m.atlas));
    nlohmann::json ratios = nlohmann::json::array();
    for (const auto &r : cmp.ratios)
        ratios.push_back(r.to_string());
    rep.check("det of the corrected cocycle is O(3D_0) up to constants", cmp.ratios_constant, ratios);
    rep.check("determinant constants multiply to 1 around the loop", cmp.loop_product.to_string() == "1",
              cmp.loop_product.to_string());

    for (const auto &[o, f] : factors) {
        const auto wd = wall_data(correction_exponent(f, m.atlas.to_torus(o.second)));
        rep.data["walls"][overlap_name(o)] = {{"m", {wd.m.x, wd.m.y}}, {"n", {wd.n.x, wd.n.y}},
                                              {"det", wd.orientation}};
        rep.check("wall " + overlap_name(o) + " tangent is positively oriented", wd.orientation > 0, wd.orientation);
    }

    const auto tangent = reference_tangent_cocycle(m.atlas);
    add_validation(rep, "intertwiner: ", check_intertwining(tangent, corrected, corrected_intertwiner(constants, m.atlas)));
    const auto printed = check_intertwining(tangent, corrected, printed_intertwiner(constants, m.atlas));
    if (!printed.ok()) {
        std::string why;
        for (const auto &c : printed.failures())
            why += " [" + c.name + ": " + c.detail + "]";
        rep.note("the intertwiner with the (2,1) signs of f_1, f_2 as printed fails:" + why);
    }

    // Rediscovery on one instantiation: the user's constants, or a seeded draw.
    std::mt19937_64 rng(cfg.seed);
    const Constants inst = constants.mode() == ParameterMode::Instantiated
                               ? constants
                               : constants.instantiate(detail::random_params(rng, constants.parameter_names().size()));
    rep.data["rediscovery_constants"] = inst.describe();
    const auto mi = model_L(inst);
    const auto corr_i = corrected_cocycle(mi.semiflat, standard_wall_factors(inst, mi.atlas), twist);
    const auto tan_i = reference_tangent_cocycle(mi.atlas);
    const auto search = solve_intertwiner(tan_i, corr_i, cfg.bound, cfg.seed);
    rep.data["intertwiner_search"] = {{"status", to_string(search.status)},
                                      {"bound", search.bound},
                                      {"unknowns", search.unknowns},
                                      {"equations", search.equations},
                                      {"kernel_dimension", search.kernel.size()}};
    rep.check("intertwiner search finds an isomorphism within bound " + std::to_string(cfg.bound), search.found(),
              search.detail);
    rep.check("solution space contains the explicit intertwiner",
              search.found() && in_kernel_span(search, corrected_intertwiner(inst, mi.atlas)), search.detail);

    const auto us = solve_unipotent_corrections(mi.semiflat, twist, cfg.bound);
    rep.data["correction_search"] = detail::search_json(us);
    rep.check("unipotent search recovers the wall factors",
              detail::wall_factor_in_search(us, standard_wall_factors(inst, mi.atlas), mi.atlas),
              detail::search_json(us));

    std::size_t bad = 0;
    nlohmann::json first_bad;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const auto c = Constants::random_constrained(rng);
        const auto mt = model_L(c);
        const auto ct = corrected_cocycle(mt.semiflat, standard_wall_factors(c, mt.atlas), twist);
        const bool closes = cocycle_defect(ct, standard_loop()).is_identity();
        const bool iso = check_intertwining(reference_tangent_cocycle(mt.atlas), ct, corrected_intertwiner(c, mt.atlas)).ok();
        if (!(closes && iso)) {
            if (!bad)
                first_bad = {{"constants", c.describe()}, {"closes", closes}, {"intertwines", iso}};
            ++bad;
        }
    }
    if (cfg.trials)
        rep.check(std::to_string(cfg.trials) + " random instantiations close and intertwine", bad == 0,
                  bad ? nlohmann::json{{"failures", bad}, {"first", first_bad}} : nlohmann::json(nullptr));
    else
        rep.skip("random instantiations", "trials = 0");
    return rep;
}

// ---------------------------------------------------------------------------

inline Report cmd_appendix_b(const RunConfig &cfg)
{
    cfg.validate();
    Report rep("appendix-b");
    rep.config = cfg.to_json();
    if (cfg.parametric)
        throw ConfigError("appendix-b needs instantiated constants");
    const auto constants = resolve_constants(cfg, rep, sign_constants());
    rep.data["constants"] = constants.describe();

    const auto lp = model_Lprime(constants);
    add_validation(rep, "L': ", validate(lp.ms));
    const auto tr = trace_pl(lp.ms);
    const auto diff_o3 = o3_function(lp.ms.base);
    bool linear = true;
    for (std::size_t c = 1; c < tr.slopes.size(); ++c)
        linear = linear && tr.slopes[c] - diff_o3.slopes[c] == tr.slopes[0] - diff_o3.slopes[0];
    rep.check("trace of L' is linearly equivalent to O(3D_0)", linear, tr.to_json());
    rep.check("trace of L' is strictly convex", pl_is_strictly_convex(tr), tr.to_json());

    const auto search_lp = solve_unipotent_corrections(lp.semiflat, std::nullopt, cfg.bound);
    rep.data["Lprime_untwisted"] = detail::search_json(search_lp);
    const CorrectionSolution *sol = nullptr;
    for (const auto &s : search_lp.solutions)
        if (s.complete()) {
            sol = &s;
            break;
        }
    rep.check("L' admits untwisted unipotent corrections within bound " + std::to_string(cfg.bound), sol != nullptr,
              detail::search_json(search_lp));

    if (sol) {
        const auto corr = corrected_cocycle(lp.semiflat, solution_factors(*sol, lp.atlas), std::nullopt);
        const auto d = cocycle_defect(corr, standard_loop());
        rep.check("corrected L' cocycle closes", d.is_identity(), d.to_json());
        const auto s = solve_intertwiner(reference_tangent_cocycle(lp.atlas), corr, cfg.bound, cfg.seed);
        rep.data["Lprime_intertwiner"] = {{"status", to_string(s.status)}, {"kernel_dimension", s.kernel.size()}};
        if (s.found()) {
            nlohmann::json f = nlohmann::json::array();
            for (const auto &x : s.solution)
                f.push_back(x.to_json());
            rep.data["Lprime_intertwiner"]["solution"] = f;
        }
        rep.check("corrected L' bundle is isomorphic to the tangent bundle", s.found(), s.detail);
    } else {
        rep.skip("corrected L' cocycle closes", "no correction found");
        rep.skip("corrected L' bundle is isomorphic to the tangent bundle", "no correction found");
    }

    const auto l = model_L(constants);
    const auto untw = solve_unipotent_corrections(l.semiflat, std::nullopt, cfg.bound);
    rep.data["L_untwisted"] = detail::search_json(untw);
    rep.check("L admits no untwisted unipotent corrections within bound " + std::to_string(cfg.bound),
              untw.solutions.empty() && untw.undetermined == 0, detail::search_json(untw));
    const auto tw = solve_unipotent_corrections(l.semiflat, LocalSystem::standard(), cfg.bound);
    rep.data["L_twisted"] = detail::search_json(tw);
    rep.check("L admits J-twisted corrections, including the printed factors",
              detail::wall_factor_in_search(tw, standard_wall_factors(constants, l.atlas), l.atlas),
              detail::search_json(tw));

    const auto cmp = compare_multisections(l.ms, lp.ms, standard_L_Lprime_match(l.ms, lp.ms));
    nlohmann::json diffs = nlohmann::json::array();
    for (const auto &d : cmp.differences)
        diffs.push_back({{"L", l.ms.sheet_name(d.sheet_a)}, {"L'", lp.ms.sheet_name(d.sheet_b)},
                         {"slope", {d.slope.x, d.slope.y}}});
    rep.data["L_minus_Lprime"] = diffs;
    rep.check("L and L' differ sheetwise by slopes in {(1,0), (0,1)}", cmp.distinct_slopes.size() == 2 &&
                                                                        cmp.distinct_slopes[0] == Covector{0, 1} &&
                                                                        cmp.distinct_slopes[1] == Covector{1, 0},
              diffs);
    return rep;
}

// ---------------------------------------------------------------------------

inline std::vector<PolytopePoint> parse_grid(const std::string &spec)
{
    auto num = [&](const std::string &s) {
        std::size_t pos = 0;
        double v = 0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception &) {
            pos = 0;
        }
        if (pos == 0 || pos != s.size())
            throw ConfigError("bad number '" + s + "' in grid spec");
        return v;
    };
    if (spec == "regions")
        return default_region_grid();
    if (spec.rfind("regions:", 0) == 0)
        return default_region_grid(num(spec.substr(8)));
    if (spec.rfind("triangle:", 0) == 0) {
        const double n = num(spec.substr(9));
        if (n < 1 || n > 1000 || n != std::floor(n))
            throw ConfigError("triangle grid size must be an integer in [1, 1000]");
        return triangle_grid(static_cast<int>(n));
    }
    if (spec.rfind("points:", 0) == 0) {
        std::vector<PolytopePoint> out;
        std::stringstream ss(spec.substr(7));
        std::string item;
        while (std::getline(ss, item, ';')) {
            const auto c = item.find(',');
            if (c == std::string::npos)
                throw ConfigError("grid point '" + item + "' needs x1,x2");
            PolytopePoint p{num(item.substr(0, c)), num(item.substr(c + 1))};
            if (!p.interior())
                throw ConfigError("grid point '" + item + "' is not interior");
            out.push_back(p);
        }
        if (out.empty())
            throw ConfigError("empty point list");
        return out;
    }
    throw ConfigError("grid spec must be regions[:margin], triangle:N or points:x1,x2;...");
}

inline std::string sweep_csv(const SweepReport &s)
{
    std::ostringstream os;
    os.precision(17);
    os << "x1,x2,hbar,E1,E2,E12,region,err1,err2,err12\n";
    for (const auto &r : s.rows) {
        if (r.excluded) {
            os << r.x.x1 << "," << r.x.x2 << ",,,,," << to_string(r.region) << ",,,\n";
            continue;
        }
        for (const auto &x : r.samples)
            os << r.x.x1 << "," << r.x.x2 << "," << x.hbar << "," << x.entries.E1 << "," << x.entries.E2 << ","
               << x.entries.E12 << "," << to_string(r.region) << "," << x.errors.E1 << "," << x.errors.E2 << ","
               << x.errors.E12 << "\n";
    }
    return os.str();
}

inline Report cmd_tropicalize(const RunConfig &cfg, std::string *csv = nullptr)
{
    cfg.validate();
    Report rep("tropicalize");
    rep.config = cfg.to_json();
    const auto grid = parse_grid(cfg.grid);
    const auto sweep = convergence_sweep(grid, cfg.hbars, cfg.tol);
    if (csv)
        *csv = sweep_csv(sweep);

    nlohmann::json slopes = nlohmann::json::array();
    for (const auto &r : sweep.rows) {
        std::ostringstream name;
        name << "limit at (" << r.x.x1 << ", " << r.x.x2 << ")";
        if (r.excluded) {
            rep.skip(name.str(), "on a region boundary");
            continue;
        }
        name << " in " << to_string(r.region);
        nlohmann::json errs = nlohmann::json::array();
        for (const auto &s : r.samples)
            errs.push_back(s.error());
        slopes.push_back({{"x", {r.x.x1, r.x.x2}}, {"region", to_string(r.region)}, {"slope", r.slope}});
        rep.check(name.str(), r.strictly_decreasing && r.slope < 0 && r.within_tol,
                  {{"errors", errs}, {"slope", r.slope}, {"decreasing", r.strictly_decreasing}});
    }
    rep.data["fitted_slopes"] = slopes;

    // identities at every evaluated point
    double norm = 0, trace = 0;
    for (const auto &x : grid)
        for (double h : cfg.hbars) {
            const auto s = legendre_xi(x, h);
            const auto e = entries_from_xi(s);
            norm = std::max(norm, std::abs(e.E1 + e.E2 + std::exp(-logsumexp3(0.0, 2 * s[0], 2 * s[1])) - 1));
            const auto c = assemble_connection(x, h);
            trace = std::max({trace, std::abs(c.dz1[0][0] + c.dz1[1][1] - 3 * e.E1),
                              std::abs(c.dz2[0][0] + c.dz2[1][1] - 3 * e.E2)});
        }
    rep.check("softmax weights sum to 1", norm <= 1e-12, norm);
    rep.check("connection traces equal 3 E_i", trace <= 1e-12, trace);

    double round_trip = 0;
    for (const auto &x : triangle_grid(20)) {
        const auto p = potentials(x);
        const auto y = legendre_x({p.g1, p.g2});
        round_trip = std::max({round_trip, std::abs(y.x1 - x.x1), std::abs(y.x2 - x.x2)});
    }
    rep.check("Legendre transform inverts the potential gradient", round_trip <= 1e-10, round_trip);

    double fd_err = 0;
    for (const auto &x : fd_sample_points()) {
        const auto p = potentials(x);
        const auto g = fd::gradient([](double a, double b) { return g_P({a, b}); }, x.x1, x.x2);
        const auto q = fd::gradient([](double a, double b) { return psi({a, b}); }, x.x1, x.x2);
        fd_err = std::max({fd_err, fd::rel_error(p.g1, g[0]), fd::rel_error(p.g2, g[1]), fd::rel_error(p.psi1, q[0]),
                           fd::rel_error(p.psi2, q[1])});
        const auto hg = fd::hessian([](double a, double b) { return g_P({a, b}); }, x.x1, x.x2);
        const auto hp = fd::hessian([](double a, double b) { return psi({a, b}); }, x.x1, x.x2);
        const auto ag = hessian_gP(x);
        const auto ap = hessian_psi();
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                fd_err = std::max({fd_err, fd::rel_error(ag[i][j], hg[i][j]), fd::rel_error(ap[i][j], hp[i][j])});
    }
    rep.check("analytic derivatives match finite differences", fd_err <= 1e-6, fd_err);

    const double h0 = cfg.hbars.front();
    std::size_t bad = 0;
    double min_alpha = INFINITY;
    for (const auto &x : triangle_grid(20)) {
        const auto r = hessian_check(x, h0);
        min_alpha = std::min(min_alpha, r.alpha);
        bad += !(r.positive_definite && r.alpha > 0);
    }
    std::ostringstream hn;
    hn << "Hessian positive definite on the 20x20 grid at hbar = " << h0;
    rep.check(hn.str(), bad == 0, {{"failures", bad}, {"min_alpha", min_alpha}});

    bool regions_ok = true;
    const std::vector<std::pair<Vec2, Region>> deep{{{-2, -3}, Region::P0}, {{3, 0.5}, Region::P1}, {{1, 4}, Region::P2}};
    for (const auto &[xi, want] : deep)
        regions_ok = regions_ok && region_classify(legendre_x(xi)) == want &&
                     cone_of_xi(xi) == static_cast<int>(want);
    rep.check("the Legendre image of each open cone lies in the matching region", regions_ok);

    const auto syz = syz_connection_of_multisection(build_L());
    bool syz_ok = true;
    for (std::size_t k = 0; k < 3; ++k)
        syz_ok = syz_ok && syz[k] == tropical_connection(static_cast<Region>(k));
    rep.check("connection read off L matches the tropical limit on each cone", syz_ok);

    const auto lim = trop_potential_limit(1, {1, 0}, {1e2, 1e4, 1e6});
    rep.check("(1/2) log_t(1 + t^2 + 1) -> 1", lim.samples.back().error < 1e-5, lim.samples.back().error);
    return rep;
}

// ---------------------------------------------------------------------------

inline std::string path_csv(const FlowPath &p, std::size_t every)
{
    std::ostringstream os;
    os.precision(17);
    os << "t,r,theta,f,Q\n";
    for (std::size_t i = 0; i < p.samples.size(); ++i) {
        if (i % every && i + 1 != p.samples.size())
            continue;
        const auto &s = p.samples[i];
        os << s.t << "," << s.p.r << "," << s.p.theta << "," << f_caustic(s.p) << "," << first_integral(s.p) << "\n";
    }
    return os.str();
}

inline Report cmd_caustic(const RunConfig &cfg, std::string *csv = nullptr)
{
    Report rep("caustic");
    rep.config = cfg.to_json();
    const double pi = std::numbers::pi;
    const std::vector<double> expected{0, 2 * pi / 3, 4 * pi / 3};

    auto check_angles = [&](const std::vector<Separatrix> &seps, double tol) {
        if (seps.size() != 3)
            return false;
        for (double e : expected) {
            bool hit = false;
            for (const auto &s : seps)
                hit = hit || angle_distance(s.theta, e) <= tol;
            if (!hit)
                return false;
        }
        return true;
    };
    SeparatrixOptions opt;
    const auto seps = find_separatrices(opt);
    nlohmann::json angles = nlohmann::json::array();
    bool reach = true;
    for (const auto &s : seps) {
        angles.push_back({{"theta", s.theta}, {"theta_cover", s.theta_cover}, {"reaches_origin", s.reaches_origin}});
        reach = reach && s.reaches_origin;
    }
    rep.data["separatrices"] = angles;
    rep.check("exactly three flow lines leave the origin", seps.size() == 3, angles);
    rep.check("their directions are 0, 2pi/3, 4pi/3", check_angles(seps, 1e-6), angles);
    rep.check("backward flow along each reaches the origin", reach, angles);
    opt.grid *= 3;
    rep.check("separatrices unchanged at triple grid resolution", check_angles(find_separatrices(opt), 1e-6));

    const auto path = integrate_flow({0.5, pi / 6}, 1e-4, 100000);
    const auto pc = check_path(path);
    if (csv)
        *csv = path_csv(path, 100);
    rep.data["path"] = {{"start", {0.5, pi / 6}}, {"steps", path.samples.size() - 1}, {"stop", path.stop_reason}};
    rep.check("r^{3/2} sin(3 theta/2) conserved to 1e-8", pc.max_relative_drift <= 1e-8, pc.max_relative_drift);
    rep.check("f increases along the forward flow", pc.f_increasing, pc.min_f_increment);
    double drift23 = 0;
    const auto &p0 = path.samples.front().p;
    const double c0 = std::pow(p0.r, 2.0 / 3.0) * std::sin(1.5 * p0.theta);
    for (const auto &s : path.samples)
        drift23 = std::max(drift23, std::abs(std::pow(s.p.r, 2.0 / 3.0) * std::sin(1.5 * s.p.theta) - c0) / std::abs(c0));
    rep.data["r23_relative_drift"] = drift23;
    rep.note("r^{2/3} sin(3 theta/2) is not conserved along the same path (relative drift " + std::to_string(drift23) +
             "); the conserved exponent is 3/2");

    // On the cover the outgoing rays are 0, 4pi/3, 8pi/3; 2pi/3 is incoming.
    bool rays = true;
    for (double th : {0.0, 4 * pi / 3, 8 * pi / 3}) {
        const auto p = integrate_flow({1e-3, th}, 1e-4, 20000);
        const auto c = check_path(p);
        for (const auto &s : p.samples)
            rays = rays && std::abs(s.p.theta - th) <= 1e-12;
        rays = rays && c.f_increasing && p.last().r > 1e-3;
    }
    rep.check("flow started on a separatrix stays on its ray and moves outward", rays);
    const auto in = integrate_flow({1e-3, 2 * pi / 3}, 1e-4, 20000);
    bool stays = in.stop_reason == "r_min";
    for (const auto &s : in.samples)
        stays = stays && std::abs(s.p.theta - 2 * pi / 3) <= 1e-12;
    rep.check("flow started at cover angle 2pi/3 stays on its ray into the origin", stays, in.stop_reason);

    const auto sym = rotation_symmetry({0.3, 0.4}, 1e-4, 20000);
    rep.check("flow commutes with rotation by 2pi/3", sym.max_r_diff <= 1e-10 && sym.max_theta_diff <= 1e-10,
              {{"r", sym.max_r_diff}, {"theta", sym.max_theta_diff}});

    double gerr = 0;
    for (double r : {0.3, 1.0, 2.5})
        for (double th : {0.2, 1.3, 2.9, 4.4}) {
            const auto g = grad_caustic({r, th});
            const auto d = fd::gradient([](double a, double b) { return f_caustic({a, b}); }, r, th);
            gerr = std::max({gerr, fd::rel_error(g.r, d[0]), fd::rel_error(g.theta, d[1] / (r * r))});
        }
    rep.check("gradient matches finite differences", gerr <= 1e-6, gerr);
    return rep;
}

// ---------------------------------------------------------------------------

inline Report cmd_inspect_fan(const RunConfig &cfg)
{
    Report rep("inspect-fan");
    rep.config = cfg.to_json();
    const auto fan = build_p2_fan();
    rep.data["fan"] = fan.to_json();
    rep.data["cyclic_order"] = fan.cyclic_order(0);
    rep.check("fan is complete", fan.is_complete());
    for (std::size_t c = 0; c < fan.num_cones(); ++c) {
        const auto d = dual_cone(fan.cone(c));
        nlohmann::json gens = nlohmann::json::array();
        for (const auto &g : d.generators)
            gens.push_back({g.x, g.y});
        rep.data["dual_cones"].push_back(gens);
    }
    const auto o3 = o3_function(fan);
    rep.data["O(3D_0)"] = o3.to_json();
    rep.check("O(3D_0) is strictly convex", pl_is_strictly_convex(o3));
    return rep;
}

inline Report cmd_inspect_multisection(const RunConfig &cfg)
{
    Report rep("inspect-multisection");
    rep.config = cfg.to_json();
    for (const auto &[name, ms] : {std::pair{std::string("L"), build_L()}, std::pair{std::string("L'"), build_Lprime()}}) {
        rep.data[name] = ms.to_json();
        add_validation(rep, name + ": ", validate(ms));
        const auto mono = monodromy(ms, 0);
        rep.data[name + " monodromy"] = mono.mapping;
        rep.check(name + ": monodromy is a transposition", mono.is_transposition(), mono.mapping);
        const auto tr = trace_pl(ms);
        rep.data[name + " trace"] = tr.to_json();
        rep.check(name + ": trace is a continuous PL function", tr.is_continuous(), tr.to_json());
    }
    const auto l = build_L();
    rep.check("L: trace has ray values (3, 0, 0)", trace_pl(l).ray_values() == std::vector<Rational>{3, 0, 0},
              trace_pl(l).to_json());
    return rep;
}

} // namespace tropmirror
