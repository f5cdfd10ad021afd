#pragma once

// Reproducible builders for the test corpus: geometric ladders, factorial and
// squared-exponential ladders, the two-ladder construction with a partition
// of the indices, explicit point lists and seeded random ladders.

#include "poros/scale_set.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace poros {

/// A partition of {1, ..., depth} into classes N_1, N_2, ...
struct PartitionSpec {
  enum class Kind { dyadic, explicit_classes };

  Kind kind = Kind::dyadic;
  std::vector<std::vector<std::size_t>> classes;  // explicit only

  static PartitionSpec dyadic() { return {}; }
  static PartitionSpec explicit_partition(std::vector<std::vector<std::size_t>> classes);

  /// Class index m(n), 1-based.
  std::size_t class_of(std::size_t n) const;
  /// nu(k) = min N_k.
  std::size_t nu(std::size_t k) const;

  /// Disjointness, coverage of 1..depth and strictly increasing nu.
  /// Throws PreconditionError naming the violation.
  void validate(std::size_t depth) const;
};

struct LadderTraceRow {
  std::size_t n = 0;
  Rational log2_tau;
  std::size_t cls = 0;
  std::size_t nu = 0;
  Rational log2_tau_star;
};

struct LadderChecks {
  bool index_bounds = true;     // n >= nu(m(n)) >= m(n)
  bool chain = true;            // tau_{n+1} <= 2^-n tau_n <= tau*_n < tau_n
  bool ratio_decay = true;      // log2(tau_{n+1}/tau*_n) <= -n^2 + n, strictly decreasing
  std::vector<std::string> failures;

  bool all() const { return index_bounds && chain && ratio_decay; }
};

struct TwoLadderSet {
  ScaleSet set;
  std::vector<LadderTraceRow> trace;
  LadderChecks checks;

  /// The main ladder {tau_n} and the starred ladder {tau*_n}, decreasing in n.
  std::vector<LogValue> tau() const;
  std::vector<LogValue> tau_star() const;
};

inline constexpr std::size_t kMaxTwoLadderDepth = 60;

ScaleSet gen_geometric(const Rational& q, std::size_t depth);
ScaleSet gen_factorial(std::size_t depth);
ScaleSet gen_squared_exponential(std::size_t depth);
TwoLadderSet gen_example_2_8(std::size_t depth, const PartitionSpec& partition = {});

/// Seeded ladder with a regime picked by the seed (bounded gaps, growing gaps,
/// clustered gaps, sparse spikes). Same seed, same set.
ScaleSet gen_random_ladder(std::uint64_t seed, std::size_t depth);

/// Builds a set from a descriptor:
///   {"kind":"geometric","q":"1/2","depth":8}
///   {"kind":"factorial","depth":40}
///   {"kind":"squared-exponential","depth":40}
///   {"kind":"example-2-8","depth":20,"partition":{"kind":"dyadic"}}
///   {"kind":"explicit","log2_points":["0","-3"],"contains_zero":true}
///   {"kind":"random-ladder","seed":7,"depth":40}
/// Throws SchemaError with the field path on violations.
ScaleSet gen_from_descriptor(const nlohmann::json& descriptor);

/// Two-ladder set with its trace from an {"kind":"example-2-8", ...} descriptor.
TwoLadderSet ladder_from_descriptor(const nlohmann::json& descriptor);

/// Explicit descriptor for an existing set (exact log2 strings).
nlohmann::json to_descriptor(const ScaleSet& set);

/// CSV with columns n,log2_tau,class,nu,log2_tau_star.
std::string trace_csv(const std::vector<LadderTraceRow>& trace);

}  // namespace poros
