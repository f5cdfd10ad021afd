#pragma once

#include <poros/generators.hpp>
#include <poros/metric.hpp>
#include <poros/porosity.hpp>

#include <json.hpp>

#include <memory>
#include <optional>
#include <string>

namespace poros::cli {

struct SetInput {
  ScaleSet set;
  nlohmann::json descriptor;          // canonical JSON form, recorded in manifests
  std::optional<TwoLadderSet> ladder;  // present for two-ladder sets
};

/// Short forms: geometric:<q>[:<depth>], factorial[:<depth>],
/// squared-exponential[:<depth>], example-2-8[:<depth>],
/// random-ladder:<seed>[:<depth>]. Otherwise inline JSON ("{...}") or a path
/// to a JSON descriptor. Throws SchemaError.
SetInput parse_set(const std::string& text, std::size_t default_depth);

/// self | enumeration | tau | tau-star | stride:<step>:<offset> | a JSON
/// array of log2 strings (inline or a file path).
PosSeq parse_tau(const std::string& text, const SetInput& input);

/// ray | circle | single-point | star:<rays>:<set> | distorted:<factor>:<set>
/// | any set descriptor (a subset of the half-line with p = 0).
std::shared_ptr<const MetricOracle> parse_space(const std::string& text,
                                                std::size_t default_depth,
                                                nlohmann::json* canonical = nullptr);

/// Reads a whole file; throws IoError.
std::string read_file(const std::string& path);

/// JSON from inline text or a file path; throws SchemaError / IoError.
nlohmann::json load_json(const std::string& text_or_path);

}  // namespace poros::cli
