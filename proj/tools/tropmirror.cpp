#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "tropmirror/commands.hpp"

using namespace tropmirror;

namespace {

int write_file(const std::string &path, const std::string &text)
{
    std::ofstream out(path);
    if (!out) {
        std::cerr << "error: cannot write " << path << "\n";
        return 2;
    }
    out << text;
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Exact and numeric checks for the rank-2 tropical reconstruction of the tangent bundle of P^2"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, json_path, csv_path, constants, grid, cocycle;
    bool parametric = false, no_twist = false, solve_b2 = false;
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    int bound = 0;
    std::vector<double> hbars;
    double tol = 0;

    std::map<std::string, CLI::Option *> opts;
    opts["config"] = app.add_option("--config", config_path, "JSON config file; flags override it");
    opts["constants"] = app.add_option("--constants", constants, "a0=..,b0=..,a1=..,b1=..,a2=..,b2=.. (rationals)");
    opts["parametric"] = app.add_flag("--parametric", parametric, "symbolic constants with b2 solved from the constraint");
    opts["no-twist"] = app.add_flag("--no-twist", no_twist, "glue without the local-system twist");
    opts["solve-b2"] = app.add_flag("--solve-b2", solve_b2, "replace b2 so that prod a_i b_i = -1 instead of rejecting");
    opts["seed"] = app.add_option("--seed", seed, "seed for randomized trials");
    opts["trials"] = app.add_option("--trials", trials, "random instantiations in reconstruct");
    opts["bound"] = app.add_option("--bound", bound, "exponent bound for the searches");
    opts["grid"] = app.add_option("--grid", grid, "regions[:margin] | triangle:N | points:x1,x2;...");
    opts["hbar"] = app.add_option("--hbar", hbars, "strictly decreasing hbar values")->delimiter(',');
    opts["tol"] = app.add_option("--tol", tol, "tolerance at the smallest hbar");
    opts["cocycle"] = app.add_option("--cocycle", cocycle, "verify-tangent: cocycle fixture (JSON)");
    app.add_option("--json", json_path, "write the JSON report here ('-' for stdout)");
    app.add_option("--csv", csv_path, "tropicalize/caustic: write CSV data here");

    using Runner = std::function<Report(const RunConfig &, std::string *)>;
    const std::vector<std::tuple<std::string, std::string, Runner>> commands{
        {"verify-tangent", "check the tangent-bundle transition matrices",
         [](const RunConfig &c, std::string *) { return cmd_verify_tangent(c); }},
        {"reconstruct", "glue the semi-flat bundle of L with wall corrections and compare with the tangent bundle",
         [](const RunConfig &c, std::string *) { return cmd_reconstruct(c); }},
        {"appendix-b", "corrections without a twist for the second multi-section",
         [](const RunConfig &c, std::string *) { return cmd_appendix_b(c); }},
        {"tropicalize", "hbar -> 0 limits of the Fubini-Study connection", cmd_tropicalize},
        {"caustic", "gradient flow of the branch-point model", cmd_caustic},
        {"inspect-fan", "dump the fan and its dual cones",
         [](const RunConfig &c, std::string *) { return cmd_inspect_fan(c); }},
        {"inspect-multisection", "dump and validate L and L'",
         [](const RunConfig &c, std::string *) { return cmd_inspect_multisection(c); }},
    };
    std::map<CLI::App *, Runner> runners;
    for (const auto &[name, help, run] : commands)
        runners[app.add_subcommand(name, help)] = run;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty())
            cfg.merge_json(load_json_file(config_path));
        auto given = [&](const char *k) { return opts[k]->count() > 0; };
        if (given("constants"))
            cfg.constants = constants;
        if (given("parametric"))
            cfg.parametric = parametric;
        if (given("no-twist"))
            cfg.no_twist = no_twist;
        if (given("solve-b2"))
            cfg.solve_b2 = solve_b2;
        if (given("seed"))
            cfg.seed = seed;
        if (given("trials"))
            cfg.trials = trials;
        if (given("bound"))
            cfg.bound = bound;
        if (given("grid"))
            cfg.grid = grid;
        if (given("hbar"))
            cfg.hbars = hbars;
        if (given("tol"))
            cfg.tol = tol;
        if (given("cocycle"))
            cfg.cocycle = cocycle;
        cfg.validate();

        Runner run;
        for (auto *sub : app.get_subcommands())
            run = runners.at(sub);
        std::string csv;
        const auto rep = run(cfg, &csv);

        if (json_path == "-") {
            std::cout << rep.to_json().dump(2) << "\n";
        } else {
            rep.print(std::cout);
            if (!json_path.empty() && write_file(json_path, rep.to_json().dump(2) + "\n"))
                return 2;
        }
        if (!csv_path.empty()) {
            if (csv.empty())
                std::cerr << "warning: " << rep.command() << " produces no CSV\n";
            else if (write_file(csv_path, csv))
                return 2;
        }
        return rep.ok() ? 0 : 1;
    } catch (const ConfigError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
