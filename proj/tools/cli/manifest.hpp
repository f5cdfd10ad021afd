#pragma once

// Run manifests: enough to rerun a command and check its inputs are the ones
// that produced a report.

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace poros::cli {

struct RunManifest {
  std::vector<std::string> command_line;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json inputs = nlohmann::json::object();  // canonical input descriptors
  std::string config_digest;                          // hex SHA-256 over config + inputs
  std::uint64_t seed = 0;
  std::string tool_version;
  std::vector<std::string> outputs;

  /// Digest of the current config and inputs.
  std::string compute_digest() const;
  /// Stores compute_digest().
  void seal();
  /// True when the stored digest matches the recomputed one.
  bool verify() const;

  nlohmann::json to_json() const;
  /// Throws SchemaError with the field path.
  static RunManifest from_json(const nlohmann::json& j);
};

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& data);

}  // namespace poros::cli
