#pragma once

// Boundedness experiment: compares the w-porosity verdict on the distance set
// S = S_p(X) with what the simulated pretangent spaces of X look like.

#include "poros/pretangent.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace poros {

struct ExperimentConfig {
  std::size_t depth = 40;  // length of the random geometric decays
  int tol_log2 = -20;
  Rational window_fraction{1, 2};
  std::size_t trials = 100;  // normalizing sequences per experiment
  std::uint64_t seed = 1;
  std::vector<PosSeq> normalizing;  // extra sequences, tried first
  std::size_t pool_budget = 64;     // level sequences per family
  std::size_t ladder_levels = 16;   // J
  std::size_t distance_budget = 256;
  PorosityParams porosity;

  double tol() const;
  StabilityParams stability() const;

  /// {"depth", "tol_log2", "window_fraction", "trials", "seed", "normalizing",
  ///  "pool_budget"}; every field optional. "normalizing" is a list of lists
  /// of log2 strings. Throws SchemaError with the field path.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct ExperimentRow {
  std::size_t run_id = 0;
  std::string r_descriptor;
  std::size_t length = 0;
  std::string status = "ok";  // or the construction error
  double diameter = 0;
  std::size_t class_count = 0;
  double diameter_s = 0;  // same r over the distance set, or the image family if larger
  std::size_t class_count_s = 0;
  double half_diameter = 0;  // r truncated to its first half
};

struct LadderRow {
  std::size_t j = 0;
  bool achieved = false;
  double quotient = 0;  // limit d(p, b_j) / r of the chosen member
  double diameter = 0;  // diameter of {p, b_1, ..., b_j}
  std::string member;
};

struct ExperimentReport {
  std::string space;
  std::size_t distance_set_size = 0;
  Status w_status = Status::inconclusive;
  std::vector<ExperimentRow> rows;
  std::string ladder_r;
  std::vector<LadderRow> ladder;
  double max_diameter = 0;
  double max_half_diameter = 0;
  std::string diameter_trend;  // stable, growing
  std::string observation;     // bounded, unbounded, undetermined
  std::string agreement;       // agree, disagree, inconclusive-compatible
  std::size_t inequality_violations = 0;  // diam X > 2 diam S + 4 tol
  std::size_t max_class_count = 0;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
  /// run_id,r_descriptor,diameter,class_count,status
  std::string to_csv() const;
};

/// Normalizing sequences drawn from S: its enumeration, stride subsequences,
/// seeded random subsequences and seeded geometric decays, `count` in total.
std::vector<PosSeq> normalizing_pool(const ScaleSet& s, const ExperimentConfig& config,
                                     std::size_t count);

ExperimentReport boundedness_experiment(const MetricOracle& space, const ExperimentConfig& config);

}  // namespace poros
