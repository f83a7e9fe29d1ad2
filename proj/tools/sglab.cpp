#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include <gasket/errors.hpp>

#include "sglab/config.hpp"
#include "sglab/run.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Numerics for Brownian motion, BSDEs and semilinear equations on the Sierpinski gasket"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", sglab::version_string());

    sglab::RunConfig c;
    app.add_option("--seed", c.seed, "Random seed");
    app.add_option("--workers", c.workers, "Worker threads")->check(CLI::Range(1, 256));
    app.add_option("--out", c.out, "Output file (stdout when omitted)");
    app.add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

    auto level = [&](CLI::App* sub) { sub->add_option("--level", c.level, "Graph level m")->check(CLI::Range(0, 12)); };
    auto problem = [&](CLI::App* sub, bool required) {
        auto* o = sub->add_option("--problem", c.problem, "Problem JSON file")->check(CLI::ExistingFile);
        if (required) {
            o->required();
        }
    };
    auto boundary = [&](CLI::App* sub) {
        sub->add_option("--boundary", c.boundary, "Boundary values at p1,p2,p3 (rationals)")
            ->delimiter(',')
            ->expected(3);
    };

    auto* graph = app.add_subcommand("graph", "Vertices, edges and cells of V_m");
    level(graph);

    auto* harmonic = app.add_subcommand("harmonic", "Harmonic extension of boundary data to V_m");
    level(harmonic);
    boundary(harmonic);
    harmonic->add_option("--arithmetic", c.arithmetic)->check(CLI::IsMember({"exact", "float"}));

    auto* measure = app.add_subcommand("measure", "Cell masses of mu, nu or an energy measure");
    level(measure);
    boundary(measure);
    measure->add_option("--kind", c.kind)->check(CLI::IsMember({"mu", "nu", "energy"}));

    auto* walk = app.add_subcommand("walk", "Random walk ensembles");
    level(walk);
    walk->add_option("--start", c.start, "vertex:ID, word:W or mu");
    walk->add_option("--horizon", c.horizon)->check(CLI::PositiveNumber);
    walk->add_option("--paths", c.paths)->check(CLI::PositiveNumber);
    walk->add_flag("--killed", c.killed, "Absorb on V_0");
    walk->add_option("--stat", c.stat)->check(CLI::IsMember({"paths", "exit", "histogram", "expint"}));
    walk->add_option("--beta", c.beta, "Exponent for --stat expint");
    walk->add_option("--hist-level", c.hist_level)->check(CLI::Range(0, 12));

    auto* bsde = app.add_subcommand("bsde", "Backward SDE on the level-m chain");
    level(bsde);
    problem(bsde, true);
    bsde->add_option("--scheme", c.scheme)->check(CLI::IsMember({"explicit", "picard-in-step"}));
    bsde->add_option("--iters", c.iters, "Picard iterations (0 = dynamic programming)")->check(CLI::NonNegativeNumber);
    bsde->add_option("--dt-per-step", c.dt_per_step)->check(CLI::PositiveNumber);
    bsde->add_option("--stride", c.stride, "Write every n-th layer")->check(CLI::PositiveNumber);
    bsde->add_option("--paths", c.paths, "Paths for the V^beta distances");
    bsde->add_option("--beta0", c.beta0);
    bsde->add_option("--beta1", c.beta1);

    auto* pde = app.add_subcommand("pde", "Weak semilinear parabolic solver");
    level(pde);
    problem(pde, true);
    pde->add_option("--steps", c.steps)->check(CLI::PositiveNumber);
    pde->add_option("--stride", c.stride)->check(CLI::PositiveNumber);

    auto* check = app.add_subcommand("check", "Cross-checks and bounds");
    check->require_subcommand(1);
    auto* fk = check->add_subcommand("fk", "Compare the PDE solution with the BSDE representation");
    problem(fk, true);
    fk->add_option("--levels", c.levels)->delimiter(',');
    fk->add_option("--times", c.times)->delimiter(',');
    fk->add_option("--probe-level", c.probe_level)->check(CLI::Range(1, 4));
    auto* bounds = check->add_subcommand("bounds", "Special functions and moment bounds");
    bounds->add_option("--which", c.which)->check(CLI::IsMember({"ml", "beta-chain", "moments", "expint"}));
    level(bounds);
    bounds->add_option("--paths", c.paths);
    bounds->add_option("--times", c.times)->delimiter(',');
    bounds->add_option("--beta", c.beta);
    bounds->add_option("--horizon", c.horizon);
    bounds->add_option("--start", c.start);
    auto* contraction = check->add_subcommand("contraction", "Picard contraction in the V^beta norm");
    level(contraction);
    problem(contraction, false);
    contraction->add_option("--beta0", c.beta0)->check(CLI::Range(1.0, 1e6));
    contraction->add_option("--beta1", c.beta1)->check(CLI::Range(1.0, 1e6));
    contraction->add_option("--iters", c.iters);
    contraction->add_option("--paths", c.paths);
    auto* identity = check->add_subcommand("identity", "Exact energy and measure identities");
    level(identity);

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run a JSON configuration");
    run->add_option("--config", config_path)->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (run->parsed()) {
        std::ifstream in(config_path);
        std::stringstream text;
        text << in.rdbuf();
        try {
            sglab::RunConfig file = sglab::config_from_json(text.str());
            // Global flags on the command line override the file.
            if (app.count("--workers")) {
                file.workers = c.workers;
            }
            if (app.count("--out")) {
                file.out = c.out;
            }
            if (app.count("--seed")) {
                file.seed = c.seed;
            }
            c = file;
        } catch (const gasket::UsageError& e) {
            std::cerr << "usage error: " << e.what() << '\n';
            return 2;
        }
    } else {
        for (auto* sub : app.get_subcommands()) {
            c.command = sub->get_name();
            if (sub == check) {
                c.check = check->get_subcommands().front()->get_name();
            }
        }
    }
    return sglab::run(c, std::cout, std::cerr);
}
