#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sglab {

/// Everything a run depends on. Two runs with equal configs (ignoring workers and out)
/// produce byte-identical primary output.
struct RunConfig {
    std::string command;
    std::string check;
    int level = 3;
    std::vector<int> levels{3, 4, 5};
    std::uint64_t seed = 1;
    std::size_t paths = 1000;
    double horizon = 1.0;
    std::string problem;
    std::string out;
    int workers = 1;
    std::string arithmetic = "exact";
    std::string format = "csv";
    std::string kind = "mu";
    std::vector<std::string> boundary{"1", "0", "0"};
    std::string start = "mu";
    bool killed = false;
    std::string stat = "paths";
    double beta = 0.25;
    double beta0 = 36.0;
    double beta1 = 36.0;
    int hist_level = 1;
    std::string scheme = "explicit";
    int iters = 0;
    std::optional<double> dt_per_step;
    std::optional<int> steps;
    int stride = 1;
    std::vector<double> times{0.0, 0.2, 0.4, 0.6, 0.8};
    std::string which = "ml";
    int probe_level = 2;
};

/// The published schema for configuration files.
const std::string& run_config_schema();

/// Validates against the schema and converts. Throws gasket::UsageError naming the field path.
RunConfig config_from_json(const std::string& text);
std::string config_to_json(const RunConfig& c);

/// FNV-1a over the canonical JSON form without workers and out.
std::uint64_t config_hash(const RunConfig& c);

/// Checks that do not fit the schema (cross-field requirements).
void check_config(const RunConfig& c);

}  // namespace sglab
