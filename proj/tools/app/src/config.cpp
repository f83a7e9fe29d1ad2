#include "sglab/config.hpp"

#include <algorithm>

#include <json.hpp>

#include <gasket/errors.hpp>

#include "schema_text.hpp"
#include "sglab/schema.hpp"

namespace sglab {

using nlohmann::json;
using nlohmann::ordered_json;

const std::string& run_config_schema()
{
    static const std::string text = detail::kRunConfigSchema;
    return text;
}

RunConfig config_from_json(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw gasket::UsageError(std::string("config is not valid JSON: ") + e.what());
    }
    const auto errors = validate(json::parse(run_config_schema()), doc);
    if (!errors.empty()) {
        std::string msg = "config does not match the schema:";
        for (const auto& e : errors) {
            msg += "\n  " + e;
        }
        throw gasket::UsageError(msg);
    }
    RunConfig c;
    auto get = [&](const char* key, auto& field) {
        if (doc.contains(key)) {
            field = doc.at(key).get<std::decay_t<decltype(field)>>();
        }
    };
    get("command", c.command);
    get("check", c.check);
    get("level", c.level);
    get("levels", c.levels);
    get("seed", c.seed);
    get("paths", c.paths);
    get("horizon", c.horizon);
    get("problem", c.problem);
    get("out", c.out);
    get("workers", c.workers);
    get("arithmetic", c.arithmetic);
    get("format", c.format);
    get("kind", c.kind);
    get("boundary", c.boundary);
    get("start", c.start);
    get("killed", c.killed);
    get("stat", c.stat);
    get("beta", c.beta);
    get("beta0", c.beta0);
    get("beta1", c.beta1);
    get("hist_level", c.hist_level);
    get("scheme", c.scheme);
    get("iters", c.iters);
    get("stride", c.stride);
    get("times", c.times);
    get("which", c.which);
    get("probe_level", c.probe_level);
    if (doc.contains("dt_per_step")) {
        c.dt_per_step = doc.at("dt_per_step").get<double>();
    }
    if (doc.contains("steps")) {
        c.steps = doc.at("steps").get<int>();
    }
    check_config(c);
    return c;
}

namespace {

ordered_json canonical(const RunConfig& c)
{
    ordered_json j;
    j["command"] = c.command;
    j["check"] = c.check;
    j["level"] = c.level;
    j["levels"] = c.levels;
    j["seed"] = c.seed;
    j["paths"] = c.paths;
    j["horizon"] = c.horizon;
    j["problem"] = c.problem;
    j["arithmetic"] = c.arithmetic;
    j["format"] = c.format;
    j["kind"] = c.kind;
    j["boundary"] = c.boundary;
    j["start"] = c.start;
    j["killed"] = c.killed;
    j["stat"] = c.stat;
    j["beta"] = c.beta;
    j["beta0"] = c.beta0;
    j["beta1"] = c.beta1;
    j["hist_level"] = c.hist_level;
    j["scheme"] = c.scheme;
    j["iters"] = c.iters;
    if (c.dt_per_step) {
        j["dt_per_step"] = *c.dt_per_step;
    }
    if (c.steps) {
        j["steps"] = *c.steps;
    }
    j["stride"] = c.stride;
    j["times"] = c.times;
    j["which"] = c.which;
    j["probe_level"] = c.probe_level;
    return j;
}

}  // namespace

std::string config_to_json(const RunConfig& c)
{
    ordered_json j = canonical(c);
    j["workers"] = c.workers;
    if (!c.out.empty()) {
        j["out"] = c.out;
    }
    if (c.check.empty()) {
        j.erase("check");
    }
    if (c.problem.empty()) {
        j.erase("problem");
    }
    return j.dump(2);
}

std::uint64_t config_hash(const RunConfig& c)
{
    const std::string text = canonical(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void check_config(const RunConfig& c)
{
    static const std::vector<std::string> commands{"graph", "harmonic", "measure", "walk", "bsde", "pde", "check"};
    if (c.command.empty()) {
        throw gasket::UsageError("missing required field: command (one of graph, harmonic, measure, walk, bsde, pde, check)");
    }
    if (std::find(commands.begin(), commands.end(), c.command) == commands.end()) {
        throw gasket::UsageError("unknown command '" + c.command + "'");
    }
    if (c.command == "check" && c.check.empty()) {
        throw gasket::UsageError("check needs a kind: fk, bounds, contraction or identity");
    }
    const bool needs_problem = c.command == "bsde" || c.command == "pde" || (c.command == "check" && c.check == "fk");
    if (needs_problem && c.problem.empty()) {
        throw gasket::UsageError(c.command + (c.check.empty() ? "" : " " + c.check) + " needs a problem file");
    }
    if (c.workers < 1) {
        throw gasket::UsageError("workers must be at least 1");
    }
    if (c.level < 0) {
        throw gasket::UsageError("level must be non-negative");
    }
    if (c.format != "csv" && c.format != "json") {
        throw gasket::UsageError("format must be csv or json");
    }
}

}  // namespace sglab
