#include "sglab/run.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <gasket/bounds.hpp>
#include <gasket/bsde.hpp>
#include <gasket/errors.hpp>
#include <gasket/feynman_kac.hpp>
#include <gasket/harmonic.hpp>
#include <gasket/measures.hpp>
#include <gasket/parallel.hpp>
#include <gasket/pde.hpp>
#include <gasket/walk.hpp>

#include "sglab/output.hpp"

namespace sglab {

using nlohmann::ordered_json;
using gasket::Rational;

std::string version_string() { return "0.1.0"; }

namespace {

Rational parse_rational(const std::string& text)
{
    try {
        if (text.find_first_of(".eE") != std::string::npos) {
            std::size_t used = 0;
            const double d = std::stod(text, &used);
            if (used != text.size()) {
                throw gasket::UsageError("");
            }
            return Rational(d);
        }
        Rational q(text, 10);
        q.canonicalize();
        return q;
    } catch (const std::exception&) {
        throw gasket::UsageError("'" + text + "' is not a rational number");
    }
}

gasket::BoundaryTriple<Rational> boundary_triple(const RunConfig& c)
{
    if (c.boundary.size() != 3) {
        throw gasket::UsageError("boundary needs three values");
    }
    return {parse_rational(c.boundary[0]), parse_rational(c.boundary[1]), parse_rational(c.boundary[2])};
}

std::string rational_text(const Rational& q)
{
    return gasket::numerator_string(q) + "/" + gasket::denominator_string(q);
}

std::string emit(const Table& t, const std::string& format)
{
    std::ostringstream s;
    write_table(t, format, s);
    return s.str();
}

RunOutput cmd_graph(const RunConfig& c)
{
    const auto g = gasket::build_level_graph(c.level);
    RunOutput out;
    if (c.format == "json") {
        std::ostringstream s;
        gasket::write_graph_json(g, s);
        out.primary = s.str();
    } else {
        Table t{{"id", "x_num", "x_den", "y_sqrt3_num", "y_sqrt3_den", "x", "y", "boundary"}, {}};
        for (const auto& v : g.vertices()) {
            t.add({std::int64_t{v.id}, gasket::numerator_string(v.coords.x), gasket::denominator_string(v.coords.x),
                   gasket::numerator_string(v.coords.y_sqrt3), gasket::denominator_string(v.coords.y_sqrt3),
                   v.coords.x_double(), v.coords.y_double(), std::int64_t{v.is_boundary ? 1 : 0}});
        }
        out.primary = emit(t, c.format);
        Table e{{"a", "b"}, {}};
        for (const auto& [a, b] : g.edges()) {
            e.add({std::int64_t{a}, std::int64_t{b}});
        }
        out.extras.emplace_back(".edges.csv", emit(e, "csv"));
    }
    out.diagnostics["vertices"] = g.vertex_count();
    out.diagnostics["edges"] = g.edge_count();
    out.diagnostics["cells"] = g.cell_count();
    return out;
}

RunOutput cmd_harmonic(const RunConfig& c)
{
    const auto g = gasket::build_level_graph(c.level);
    const auto u = boundary_triple(c);
    RunOutput out;
    if (c.arithmetic == "exact") {
        const auto table = gasket::harmonic_extend_to_level<Rational>(u, g);
        Table t{{"id", "value_num", "value_den", "value"}, {}};
        for (std::size_t x = 0; x < table.size(); ++x) {
            t.add({static_cast<std::int64_t>(x), gasket::numerator_string(table[x]),
                   gasket::denominator_string(table[x]), table[x].get_d()});
        }
        out.primary = emit(t, c.format);
        const Rational e = gasket::graph_energy(g, table, table);
        out.diagnostics["energy"] = rational_text(e);
        out.diagnostics["energy_formula"] = rational_text(gasket::harmonic_energy(u));
    } else {
        const gasket::BoundaryTriple<double> ud{u[0].get_d(), u[1].get_d(), u[2].get_d()};
        const auto table = gasket::harmonic_extend_to_level<double>(ud, g);
        Table t{{"id", "value"}, {}};
        for (std::size_t x = 0; x < table.size(); ++x) {
            t.add({static_cast<std::int64_t>(x), table[x]});
        }
        out.primary = emit(t, c.format);
        out.diagnostics["energy"] = gasket::graph_energy(g, table, table);
    }
    return out;
}

RunOutput cmd_measure(const RunConfig& c)
{
    const auto kind = gasket::parse_measure_kind(c.kind);
    gasket::CellMeasure m;
    switch (kind) {
    case gasket::MeasureKind::hausdorff:
        m = gasket::hausdorff_measure_table(c.level);
        break;
    case gasket::MeasureKind::kusuoka:
        m = gasket::kusuoka_measure_table(c.level);
        break;
    case gasket::MeasureKind::energy:
        m = gasket::energy_measure_table(boundary_triple(c), c.level);
        break;
    }
    Table t{{"word", "mass_num", "mass_den", "mass"}, {}};
    for (std::size_t i = 0; i < m.masses.size(); ++i) {
        const auto w = gasket::CellWord::from_index(i, c.level);
        t.add({w.str().empty() ? std::string("-") : w.str(), gasket::numerator_string(m.masses[i]),
               gasket::denominator_string(m.masses[i]), m.masses[i].get_d()});
    }
    RunOutput out;
    out.primary = emit(t, c.format);
    out.diagnostics["total"] = rational_text(m.total());
    return out;
}

gasket::WalkConfig walk_config(const RunConfig& c, const gasket::LevelGraph& g)
{
    gasket::WalkConfig w;
    w.level = c.level;
    w.start = gasket::StartSpec::parse(c.start, g);
    w.horizon = c.horizon;
    w.seed = c.seed;
    w.path_count = c.paths;
    w.killed = c.killed;
    w.workers = c.workers;
    return w;
}

ordered_json estimate_json(const gasket::ExpIntEstimate& e)
{
    return {{"mean", e.mean},         {"log_mean", e.log_mean}, {"standard_error", e.standard_error},
            {"ci_low", e.ci_low},     {"ci_high", e.ci_high},   {"top_share", e.top_share},
            {"unstable", e.unstable}};
}

RunOutput cmd_walk(const RunConfig& c)
{
    const auto g = gasket::build_level_graph(c.level);
    const auto kernel = gasket::build_step_kernel(g);
    const auto w = walk_config(c, g);
    RunOutput out;
    if (c.stat == "paths") {
        struct Summary {
            int start = 0;
            std::size_t steps = 0;
            int final_vertex = 0;
            double W = 0.0;
            double QV = 0.0;
            std::int64_t hit = -1;
        };
        std::vector<Summary> rows(w.path_count);
        gasket::parallel_for(w.path_count, w.workers, [&](std::size_t p) {
            Summary s;
            gasket::PathRng rng(w.seed, p);
            s.start = gasket::draw_start(w.start, rng);
            s.final_vertex = s.start;
            const auto [steps, hit] = gasket::walk_path(kernel, w, p, w.steps(), [&](std::size_t, int, int y, double dw, double dq) {
                s.W += dw;
                s.QV += dq;
                s.final_vertex = y;
                return true;
            });
            s.steps = steps;
            s.hit = hit ? static_cast<std::int64_t>(*hit) : -1;
            rows[p] = s;
        });
        Table t{{"path", "start", "steps", "final_vertex", "W", "QV", "hit_time"}, {}};
        for (std::size_t p = 0; p < rows.size(); ++p) {
            const auto& s = rows[p];
            t.add({static_cast<std::int64_t>(p), std::int64_t{s.start}, static_cast<std::int64_t>(s.steps),
                   std::int64_t{s.final_vertex}, s.W, s.QV,
                   s.hit >= 0 ? Cell{static_cast<double>(s.hit) * kernel.dt} : Cell{std::string()}});
        }
        out.primary = emit(t, c.format);
    } else if (c.stat == "exit") {
        auto wk = w;
        wk.killed = true;
        const auto st = gasket::exit_time_stats(wk, kernel);
        ordered_json j{{"level", c.level},
                       {"paths", st.paths},
                       {"mean_time", st.mean_time},
                       {"variance_time", st.variance_time},
                       {"standard_error", st.standard_error},
                       {"ci_low", st.ci_low},
                       {"ci_high", st.ci_high},
                       {"mean_steps", st.mean_time / kernel.dt},
                       {"hit_fraction", st.hit_fraction}};
        if (!st.warning.empty()) {
            j["warning"] = st.warning;
        }
        out.primary = dump_report(j);
    } else if (c.stat == "histogram") {
        const auto hist = gasket::occupation_histogram(w, kernel, g, c.horizon, c.hist_level);
        const auto mu = gasket::hausdorff_measure_table(c.hist_level);
        Table t{{"word", "frequency", "mu"}, {}};
        std::vector<double> ref;
        for (std::size_t i = 0; i < hist.size(); ++i) {
            const auto word = gasket::CellWord::from_index(i, c.hist_level);
            ref.push_back(mu.masses[i].get_d());
            t.add({word.str().empty() ? std::string("-") : word.str(), hist[i], ref.back()});
        }
        out.primary = emit(t, c.format);
        out.diagnostics["tv_distance_to_mu"] = gasket::total_variation(hist, ref);
    } else {
        const auto est = gasket::expint_estimate(w, kernel, c.beta, c.horizon);
        ordered_json j = estimate_json(est);
        j["beta"] = c.beta;
        j["horizon"] = c.horizon;
        j["killed"] = c.killed;
        out.primary = dump_report(j);
    }
    return out;
}

std::vector<std::size_t> strided(std::size_t K, int stride)
{
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k <= K; k += static_cast<std::size_t>(stride)) {
        keep.push_back(k);
    }
    if (keep.back() != K) {
        keep.push_back(K);
    }
    return keep;
}

RunOutput cmd_bsde(const RunConfig& c)
{
    const auto spec = gasket::problem_from_file(c.problem);
    const auto g = gasket::build_level_graph(c.level);
    const auto kernel = gasket::build_step_kernel(g);
    const auto p = gasket::make_bsde_problem(spec, g);
    RunOutput out;
    gasket::BsdeSolution sol;
    if (c.iters > 0) {
        gasket::PicardOptions po;
        po.iterations = static_cast<std::size_t>(c.iters);
        po.beta = {c.beta0, c.beta1};
        po.paths = std::min<std::size_t>(c.paths, 2000);
        po.seed = c.seed;
        po.workers = c.workers;
        po.dt = c.dt_per_step;
        auto r = gasket::picard_iterate(p, kernel, g, po);
        out.diagnostics["picard_distances"] = r.distances;
        out.diagnostics["picard_ratios"] = r.ratios;
        sol = std::move(r.solution);
    } else {
        gasket::DpOptions opt;
        opt.scheme = gasket::parse_scheme(c.scheme);
        opt.dt = c.dt_per_step;
        opt.workers = c.workers;
        const double dt = c.dt_per_step.value_or(kernel.dt);
        opt.keep_steps = strided(gasket::step_count_for(p.horizon, dt), c.stride);
        sol = gasket::solve_dp(p, kernel, opt);
    }
    Table t{{"step", "t", "vertex_id", "Y", "Z"}, {}};
    for (std::size_t i = 0; i < sol.steps.size(); ++i) {
        const std::size_t k = sol.steps[i];
        if (c.iters > 0 && k % static_cast<std::size_t>(c.stride) != 0 && k != sol.step_count) {
            continue;
        }
        for (std::size_t x = 0; x < sol.Y[i].size(); ++x) {
            t.add({static_cast<std::int64_t>(k), static_cast<double>(k) * sol.dt, static_cast<std::int64_t>(x),
                   sol.Y[i][x], sol.Z[i][x]});
        }
    }
    out.primary = emit(t, c.format);
    out.diagnostics["level"] = sol.level;
    out.diagnostics["dt"] = sol.dt;
    out.diagnostics["steps"] = sol.step_count;
    out.diagnostics["scheme"] = c.iters > 0 ? std::string("picard") : gasket::to_string(sol.scheme);
    out.diagnostics["inner_iterations"] = sol.iterations;
    out.diagnostics["warnings"] = sol.warnings;
    return out;
}

RunOutput cmd_pde(const RunConfig& c)
{
    const auto spec = gasket::problem_from_file(c.problem);
    const auto g = gasket::build_level_graph(c.level);
    auto p = gasket::make_pde_problem(spec, g);
    if (c.steps) {
        p.h = p.horizon / *c.steps;
    }
    const double h = p.h.value_or(gasket::diffusion_time_step(c.level));
    gasket::PdeOptions opt;
    opt.keep_steps = strided(static_cast<std::size_t>(std::ceil(p.horizon / h - 1e-9)), c.stride);
    opt.gradients = true;
    const auto sol = gasket::solve_weak_pde(p, g, opt);
    Table t{{"layer", "t", "vertex_id", "u"}, {}};
    Table grad{{"layer", "t", "cell", "gradient"}, {}};
    for (std::size_t i = 0; i < sol.steps.size(); ++i) {
        const auto k = static_cast<std::int64_t>(sol.steps[i]);
        const double t_k = static_cast<double>(sol.steps[i]) * sol.h;
        for (std::size_t x = 0; x < sol.u[i].size(); ++x) {
            t.add({k, t_k, static_cast<std::int64_t>(x), sol.u[i][x]});
        }
        for (std::size_t cell = 0; cell < sol.gradient[i].size(); ++cell) {
            grad.add({k, t_k, g.cells()[cell].word.str(), sol.gradient[i][cell]});
        }
    }
    RunOutput out;
    out.primary = emit(t, c.format);
    out.extras.emplace_back(".grad.csv", emit(grad, "csv"));
    double worst = 0.0;
    for (double r : sol.residual) {
        worst = std::max(worst, r);
    }
    out.diagnostics["h"] = sol.h;
    out.diagnostics["steps"] = sol.step_count;
    out.diagnostics["max_residual"] = worst;
    out.diagnostics["terminal_mismatch"] = sol.terminal_mismatch;
    return out;
}

RunOutput check_fk(const RunConfig& c)
{
    const auto spec = gasket::problem_from_file(c.problem);
    const auto probes = gasket::probe_grid(c.probe_level, c.times);
    const auto r = gasket::feynman_kac_check(spec, c.levels, probes, c.workers);
    RunOutput out;
    if (c.format == "json") {
        ordered_json j;
        j["strictly_decreasing"] = r.strictly_decreasing;
        ordered_json levels = ordered_json::array();
        for (const auto& l : r.levels) {
            levels.push_back({{"level", l.level}, {"sup_error", l.sup_error}, {"errors", l.error}});
        }
        j["levels"] = levels;
        out.primary = dump_report(j);
    } else {
        Table t{{"level", "t", "x", "y", "pde", "bsde", "abs_error", "sup_error"}, {}};
        for (const auto& l : r.levels) {
            for (std::size_t i = 0; i < probes.size(); ++i) {
                t.add({std::int64_t{l.level}, probes[i].t, probes[i].point.x_double(), probes[i].point.y_double(),
                       l.pde[i], l.bsde[i], l.error[i], l.sup_error});
            }
        }
        out.primary = emit(t, "csv");
    }
    ordered_json sups = ordered_json::array();
    for (const auto& l : r.levels) {
        sups.push_back({{"level", l.level}, {"sup_error", l.sup_error}});
    }
    out.diagnostics["sup_errors"] = sups;
    out.diagnostics["strictly_decreasing"] = r.strictly_decreasing;
    return out;
}

RunOutput check_bounds(const RunConfig& c)
{
    ordered_json j;
    const auto sc = gasket::spectral_constants();
    j["d_s"] = sc.d_s;
    j["gamma_s"] = sc.gamma_s;
    if (c.which == "beta-chain") {
        ordered_json rows = ordered_json::array();
        for (int p : {1, 2, 3}) {
            for (double gamma : {sc.gamma_s, 0.5}) {
                const auto r = gasket::beta_chain_identity(p, gamma);
                rows.push_back({{"p", p}, {"gamma", gamma}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"gap", r.gap}});
            }
        }
        j["beta_chain"] = rows;
    } else if (c.which == "moments" || c.which == "ml") {
        const auto g = gasket::build_level_graph(c.level);
        const auto kernel = gasket::build_step_kernel(g);
        std::vector<gasket::QvEnsemble> ensembles;
        const std::vector<int> starts = c.level >= 1 ? std::vector<int>{0, 3, 4, 5} : std::vector<int>{0};
        std::vector<double> times;
        for (double t : c.times) {
            if (t > 0.0) {
                times.push_back(t);
            }
        }
        if (times.empty()) {
            throw gasket::UsageError("bounds checks need positive times");
        }
        for (int s : starts) {
            ensembles.push_back(gasket::sample_quadratic_variation(kernel, s, times, c.paths, c.seed, c.workers));
        }
        const auto mb = gasket::moment_bound_check(ensembles, {1, 2, 3, 4});
        j["C"] = mb.C;
        j["moments_hold"] = mb.holds;
        ordered_json rows = ordered_json::array();
        for (const auto& e : mb.entries) {
            rows.push_back({{"start", e.start},
                            {"p", e.p},
                            {"t", e.t},
                            {"moment", e.moment},
                            {"standard_error", e.standard_error},
                            {"required_C", e.required_C},
                            {"bound", e.bound},
                            {"holds", e.holds}});
        }
        j["moments"] = rows;
        if (c.which == "ml") {
            const auto ml = gasket::mittag_leffler_bound_check(ensembles, {0.25, 0.5, 1.0}, mb.C, c.seed);
            j["ml_holds"] = ml.holds;
            ordered_json mrows = ordered_json::array();
            for (const auto& e : ml.entries) {
                mrows.push_back({{"beta", e.beta},
                                 {"t", e.t},
                                 {"worst_start", e.worst_start},
                                 {"estimate", estimate_json(e.estimate)},
                                 {"bound", e.bound},
                                 {"holds", e.holds}});
            }
            j["mittag_leffler"] = mrows;
        }
    } else {
        const auto g = gasket::build_level_graph(c.level);
        const auto kernel = gasket::build_step_kernel(g);
        const auto w = walk_config(c, g);
        const auto s = gasket::expint_horizon_doubling(w, kernel, c.beta, c.horizon);
        j["beta"] = c.beta;
        j["horizon"] = s.horizon;
        j["at_horizon"] = estimate_json(s.at_horizon);
        j["at_double"] = estimate_json(s.at_double);
        j["z_score"] = s.z_score;
        j["tail_mass"] = s.tail_mass;
        j["stable"] = s.stable;
    }
    RunOutput out;
    out.primary = dump_report(j);
    return out;
}

RunOutput check_contraction(const RunConfig& c)
{
    gasket::ProblemSpec spec;
    if (!c.problem.empty()) {
        spec = gasket::problem_from_file(c.problem);
    } else {
        spec.g = gasket::ScalarLaw::linear(-0.5);
        spec.f = gasket::ScalarLaw::sine(0.5);
        spec.z_slope = 1.0;
        spec.terminal = gasket::TerminalSpec::bump();
    }
    const auto g = gasket::build_level_graph(c.level);
    const auto kernel = gasket::build_step_kernel(g);
    const auto p = gasket::make_bsde_problem(spec, g);
    gasket::PicardOptions po;
    po.iterations = c.iters > 0 ? static_cast<std::size_t>(c.iters) : 12;
    po.beta = {c.beta0, c.beta1};
    po.paths = std::min<std::size_t>(c.paths, 2000);
    po.seed = c.seed;
    po.workers = c.workers;
    const auto a = gasket::picard_iterate(p, kernel, g, po);
    po.init = gasket::PicardOptions::Init::terminal;
    const auto b = gasket::picard_iterate(p, kernel, g, po);
    double gap = 0.0;
    for (std::size_t k = 0; k < a.solution.Y.size(); ++k) {
        for (std::size_t x = 0; x < a.solution.Y[k].size(); ++x) {
            gap = std::max(gap, std::abs(a.solution.Y[k][x] - b.solution.Y[k][x]));
        }
    }
    const double kb = gasket::contraction_constant(p.K0, p.K1, po.beta);
    double worst = 0.0;
    for (double r : a.ratios) {
        worst = std::max(worst, r);
    }
    ordered_json j{{"K0", p.K0},
                   {"K1", p.K1},
                   {"beta0", c.beta0},
                   {"beta1", c.beta1},
                   {"K_beta", kb},
                   {"contraction_factor", 3.0 * std::sqrt(2.0) * kb},
                   {"distances", a.distances},
                   {"ratios", a.ratios},
                   {"max_ratio", worst},
                   {"initialisation_gap", gap}};
    RunOutput out;
    out.primary = dump_report(j);
    return out;
}

RunOutput check_identity(const RunConfig& c)
{
    ordered_json j;
    j["level"] = c.level;
    j["energy_identity_defect"] = rational_text(gasket::energy_identity_defect(c.level, 20, c.seed));
    j["self_similarity_defect"] = rational_text(gasket::self_similarity_defect(std::min(c.level, 5), 5, c.seed));
    j["kusuoka_identity_defect"] = rational_text(gasket::kusuoka_identity_check(c.level));
    j["nu_total"] = rational_text(gasket::kusuoka_measure_table(c.level).total());
    const auto sd = gasket::singularity_diagnostic(c.level);
    j["ratio_word_one"] = rational_text(sd.ratio_word_one);
    j["max_ratio"] = sd.max_ratio.get_d();
    j["min_ratio"] = sd.min_ratio.get_d();
    RunOutput out;
    out.primary = dump_report(j);
    return out;
}

}  // namespace

RunOutput execute(const RunConfig& c)
{
    check_config(c);
    if (c.command == "graph") {
        return cmd_graph(c);
    }
    if (c.command == "harmonic") {
        return cmd_harmonic(c);
    }
    if (c.command == "measure") {
        return cmd_measure(c);
    }
    if (c.command == "walk") {
        return cmd_walk(c);
    }
    if (c.command == "bsde") {
        return cmd_bsde(c);
    }
    if (c.command == "pde") {
        return cmd_pde(c);
    }
    if (c.check == "fk") {
        return check_fk(c);
    }
    if (c.check == "bounds") {
        return check_bounds(c);
    }
    if (c.check == "contraction") {
        return check_contraction(c);
    }
    if (c.check == "identity") {
        return check_identity(c);
    }
    throw gasket::UsageError("unknown check '" + c.check + "'");
}

namespace {

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw gasket::UsageError("cannot write " + path);
    }
    f << content;
}

}  // namespace

int run(const RunConfig& c, std::ostream& stdout_stream, std::ostream& log)
{
    const auto t0 = std::chrono::steady_clock::now();
    RunOutput out;
    try {
        out = execute(c);
    } catch (const gasket::UsageError& e) {
        log << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const gasket::CapacityError& e) {
        log << "capacity error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return 1;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    try {
        if (c.out.empty()) {
            stdout_stream << out.primary;
            for (const auto& [suffix, content] : out.extras) {
                (void)content;
                log << "note: " << suffix << " output is only written with --out\n";
            }
        } else {
            write_file(c.out, out.primary);
            for (const auto& [suffix, content] : out.extras) {
                write_file(c.out + suffix, content);
            }
            char hash[17];
            std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(c)));
            ordered_json meta;
            meta["version"] = version_string();
            meta["command"] = c.command + (c.check.empty() ? "" : " " + c.check);
            meta["config_hash"] = hash;
            meta["seed"] = c.seed;
            meta["workers"] = c.workers;
            meta["wall_time_s"] = wall;
            meta["config"] = ordered_json::parse(config_to_json(c));
            meta["diagnostics"] = out.diagnostics;
            write_file(c.out + ".meta.json", dump_report(meta));
        }
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return 1;
    }
    if (!out.diagnostics.empty()) {
        log << dump_report(out.diagnostics);
    }
    return 0;
}

}  // namespace sglab
