#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sglab/config.hpp"

namespace sglab {

struct RunOutput {
    std::string primary;  ///< main artifact (CSV or JSON)
    std::vector<std::pair<std::string, std::string>> extras;  ///< (file suffix, content)
    nlohmann::ordered_json diagnostics = nlohmann::ordered_json::object();
};

/// Executes one configured command without touching the filesystem (except reading the problem).
RunOutput execute(const RunConfig& c);

/// Executes and writes the primary output to c.out (stdout when empty), extras next to it and
/// the metadata sidecar <out>.meta.json. Returns the process exit status.
int run(const RunConfig& c, std::ostream& stdout_stream, std::ostream& log);

std::string version_string();

}  // namespace sglab
