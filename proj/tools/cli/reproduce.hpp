#pragma once

// Canned runs with pinned expectations. Reports are plain text, one row per
// check: "  key: value" when it matches, a "- expected" / "+ got" pair when
// it does not.

#include <json.hpp>

#include <string>
#include <vector>

namespace poros::cli {

struct ReproduceResult {
  std::string report;
  std::size_t rows = 0;
  std::size_t mismatches = 0;
};

/// example-2-8, remark-2-11, theorem-2-4-suite.
const std::vector<std::string>& reproduce_targets();

/// {"target", "depth", "seed", "trials"} with the canned values.
/// Throws SchemaError for an unknown target.
nlohmann::json reproduce_config(const std::string& target);

/// Runs the target named in `config`. Throws SchemaError on a bad config.
ReproduceResult run_reproduce(const nlohmann::json& config, const std::string& tool_version);

}  // namespace poros::cli
