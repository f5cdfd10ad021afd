#include "poros/generators.hpp"

#include "poros/error.hpp"
#include "poros/rng.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace poros {
namespace {

using nlohmann::json;

void require_depth(std::size_t depth, std::size_t min_depth, const char* what) {
  if (depth < min_depth) {
    throw PreconditionError(std::string(what) + ": depth must be >= " + std::to_string(min_depth));
  }
}

std::size_t dyadic_valuation(std::size_t n) {
  std::size_t v = 0;
  while (n % 2 == 0) {
    n /= 2;
    ++v;
  }
  return v;
}

const json& field(const json& obj, const std::string& name, const std::string& path) {
  if (!obj.contains(name)) throw SchemaError(path + "." + name + ": missing field");
  return obj.at(name);
}

std::size_t size_field(const json& obj, const std::string& name, const std::string& path) {
  const json& v = field(obj, name, path);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw SchemaError(path + "." + name + ": expected a nonnegative integer");
  }
  return v.get<std::size_t>();
}

Rational rational_field(const json& v, const std::string& path) {
  if (v.is_string()) {
    try {
      return parse_rational(v.get<std::string>());
    } catch (const SchemaError& e) {
      throw SchemaError(path + ": " + e.what());
    }
  }
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  throw SchemaError(path + ": expected a rational string \"p/q\"");
}

template <typename Fn>
auto rethrow_as_schema(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

PartitionSpec partition_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path + ": expected an object");
  const std::string kind = field(j, "kind", path).get<std::string>();
  if (kind == "dyadic") return PartitionSpec::dyadic();
  if (kind != "explicit") throw SchemaError(path + ".kind: unknown partition kind \"" + kind + "\"");
  const json& classes = field(j, "classes", path);
  if (!classes.is_array()) throw SchemaError(path + ".classes: expected an array");
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const std::string cpath = path + ".classes[" + std::to_string(i) + "]";
    if (!classes[i].is_array()) throw SchemaError(cpath + ": expected an array of indices");
    std::vector<std::size_t> cls;
    for (const json& n : classes[i]) {
      if (!n.is_number_integer() || n.get<std::int64_t>() < 1) {
        throw SchemaError(cpath + ": indices must be positive integers");
      }
      cls.push_back(n.get<std::size_t>());
    }
    out.push_back(std::move(cls));
  }
  return PartitionSpec::explicit_partition(std::move(out));
}

}  // namespace

PartitionSpec PartitionSpec::explicit_partition(std::vector<std::vector<std::size_t>> classes) {
  PartitionSpec spec;
  spec.kind = Kind::explicit_classes;
  for (auto& cls : classes) std::sort(cls.begin(), cls.end());
  spec.classes = std::move(classes);
  return spec;
}

std::size_t PartitionSpec::class_of(std::size_t n) const {
  if (n == 0) throw PreconditionError("indices are 1-based");
  if (kind == Kind::dyadic) return 1 + dyadic_valuation(n);
  for (std::size_t k = 0; k < classes.size(); ++k) {
    if (std::binary_search(classes[k].begin(), classes[k].end(), n)) return k + 1;
  }
  throw PreconditionError("index " + std::to_string(n) + " is not covered by the partition");
}

std::size_t PartitionSpec::nu(std::size_t k) const {
  if (k == 0) throw PreconditionError("classes are 1-based");
  if (kind == Kind::dyadic) return std::size_t{1} << (k - 1);
  if (k > classes.size() || classes[k - 1].empty()) {
    throw PreconditionError("class " + std::to_string(k) + " is empty or missing");
  }
  return classes[k - 1].front();
}

void PartitionSpec::validate(std::size_t depth) const {
  if (kind == Kind::dyadic) return;
  std::set<std::size_t> seen;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    if (classes[k].empty()) throw PreconditionError("partition class " + std::to_string(k + 1) + " is empty");
    for (std::size_t n : classes[k]) {
      if (!seen.insert(n).second) {
        throw PreconditionError("partition classes overlap at index " + std::to_string(n));
      }
    }
    if (k > 0 && !(classes[k - 1].front() < classes[k].front())) {
      throw PreconditionError("partition violates nu monotonicity at class " + std::to_string(k + 1));
    }
  }
  for (std::size_t n = 1; n <= depth; ++n) {
    if (!seen.count(n)) throw PreconditionError("partition does not cover index " + std::to_string(n));
  }
}

std::vector<LogValue> TwoLadderSet::tau() const {
  std::vector<LogValue> out;
  for (const auto& row : trace) out.push_back(LogValue::from_log2(row.log2_tau));
  return out;
}

std::vector<LogValue> TwoLadderSet::tau_star() const {
  std::vector<LogValue> out;
  for (const auto& row : trace) out.push_back(LogValue::from_log2(row.log2_tau_star));
  return out;
}

ScaleSet gen_geometric(const Rational& q, std::size_t depth) {
  if (!(q > 0 && q < 1)) throw PreconditionError("geometric ratio q must lie in (0, 1)");
  require_depth(depth, 1, "geometric");
  std::vector<LogValue> points;
  Rational power = 1;
  for (std::size_t i = 0; i < depth; ++i) {
    points.push_back(LogValue::from_rational(power));
    power *= q;
  }
  return ScaleSet::make(std::move(points), true);
}

ScaleSet gen_factorial(std::size_t depth) {
  require_depth(depth, 2, "factorial");
  std::vector<LogValue> points;
  Integer fact = 1;
  for (std::size_t n = 1; n <= depth; ++n) {
    fact *= n;
    points.push_back(LogValue::from_log2(Rational(-fact)));
  }
  return ScaleSet::make(std::move(points), true);
}

ScaleSet gen_squared_exponential(std::size_t depth) {
  require_depth(depth, 2, "squared-exponential");
  std::vector<LogValue> points;
  for (std::size_t n = 1; n <= depth; ++n) {
    points.push_back(LogValue::pow2(-static_cast<std::int64_t>(n * n)));
  }
  return ScaleSet::make(std::move(points), true);
}

TwoLadderSet gen_example_2_8(std::size_t depth, const PartitionSpec& partition) {
  require_depth(depth, 1, "example-2-8");
  if (depth > kMaxTwoLadderDepth) {
    throw PreconditionError("example-2-8: depth is capped at " + std::to_string(kMaxTwoLadderDepth));
  }
  partition.validate(depth);

  std::vector<LadderTraceRow> trace;
  Rational log2_tau = 0;  // tau_1 = 1
  for (std::size_t n = 1; n <= depth; ++n) {
    LadderTraceRow row;
    row.n = n;
    row.log2_tau = log2_tau;
    row.cls = partition.class_of(n);
    row.nu = partition.nu(row.cls);
    row.log2_tau_star = log2_tau - Rational(static_cast<long long>(row.nu));
    trace.push_back(row);
    log2_tau -= Rational(static_cast<long long>(n * n));  // tau_{n+1} = 2^(-n^2) tau_n
  }

  LadderChecks checks;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& row = trace[i];
    const auto n = static_cast<long long>(row.n);
    if (!(row.n >= row.nu && row.nu >= row.cls)) {
      checks.index_bounds = false;
      checks.failures.push_back("n >= nu(m(n)) >= m(n) fails at n=" + std::to_string(row.n));
    }
    if (!(row.log2_tau_star < row.log2_tau)) {
      checks.chain = false;
      checks.failures.push_back("tau*_n < tau_n fails at n=" + std::to_string(row.n));
    }
    if (i + 1 < trace.size()) {
      const Rational& next = trace[i + 1].log2_tau;
      const Rational scaled = row.log2_tau - Rational(n);
      if (!(next <= scaled && scaled <= row.log2_tau_star)) {
        checks.chain = false;
        checks.failures.push_back("tau_{n+1} <= 2^-n tau_n <= tau*_n fails at n=" + std::to_string(row.n));
      }
      const Rational ratio = next - row.log2_tau_star;
      if (!(ratio <= Rational(-n * n + n))) {
        checks.ratio_decay = false;
        checks.failures.push_back("tau_{n+1}/tau*_n bound fails at n=" + std::to_string(row.n));
      }
      if (i + 2 < trace.size()) {
        const Rational next_ratio = trace[i + 2].log2_tau - trace[i + 1].log2_tau_star;
        if (!(next_ratio < ratio)) {
          checks.ratio_decay = false;
          checks.failures.push_back("tau_{n+1}/tau*_n not decreasing at n=" + std::to_string(row.n));
        }
      }
    }
  }

  std::vector<LogValue> points;
  for (const auto& row : trace) {
    points.push_back(LogValue::from_log2(row.log2_tau));
    points.push_back(LogValue::from_log2(row.log2_tau_star));
  }
  return TwoLadderSet{ScaleSet::make(std::move(points), true), std::move(trace), std::move(checks)};
}

ScaleSet gen_random_ladder(std::uint64_t seed, std::size_t depth) {
  require_depth(depth, 4, "random-ladder");
  SplitRng rng(seed);
  const auto regime = rng.uniform(0, 3);
  std::vector<LogValue> points;
  Rational log2 = -rng.uniform(0, 3);
  points.push_back(LogValue::from_log2(log2));
  const auto cluster = rng.uniform(2, 5);
  const auto spike_every = rng.uniform(2, 4);
  for (std::size_t i = 1; i < depth; ++i) {
    const auto n = static_cast<std::int64_t>(i);
    Rational step;
    switch (regime) {
      case 0:  // bounded ratios
        step = Rational(rng.uniform(1, 6)) + Rational(rng.uniform(0, 3), 4);
        break;
      case 1:  // ratios growing with the index
        step = Rational(n + rng.uniform(1, 4)) + Rational(rng.uniform(0, 3), 4);
        break;
      case 2:  // tight clusters separated by growing gaps
        step = (n % cluster == 0) ? Rational(4 * n + rng.uniform(0, 8))
                                  : Rational(rng.uniform(1, 3)) + Rational(rng.uniform(0, 1), 2);
        break;
      default:  // bounded background with growing spikes
        step = (n % spike_every == 0) ? Rational(3 * n + rng.uniform(0, 6))
                                      : Rational(rng.uniform(1, 4));
        break;
    }
    log2 -= step;
    points.push_back(LogValue::from_log2(log2));
  }
  return ScaleSet::make(std::move(points), true);
}

TwoLadderSet ladder_from_descriptor(const json& d) {
  if (!d.is_object()) throw SchemaError("$: expected an object");
  const json& kind = field(d, "kind", "$");
  if (!kind.is_string() || kind.get<std::string>() != "example-2-8") {
    throw SchemaError("$.kind: expected \"example-2-8\"");
  }
  const std::size_t depth = size_field(d, "depth", "$");
  PartitionSpec partition;
  if (d.contains("partition")) partition = partition_from_json(d.at("partition"), "$.partition");
  return rethrow_as_schema("$", [&] { return gen_example_2_8(depth, partition); });
}

ScaleSet gen_from_descriptor(const json& d) {
  const std::string path = "$";
  if (!d.is_object()) throw SchemaError("$: expected an object");
  const json& kind_v = field(d, "kind", path);
  if (!kind_v.is_string()) throw SchemaError("$.kind: expected a string");
  const std::string kind = kind_v.get<std::string>();

  if (kind == "geometric") {
    const Rational q = rational_field(field(d, "q", path), "$.q");
    const std::size_t depth = size_field(d, "depth", path);
    return rethrow_as_schema("$", [&] { return gen_geometric(q, depth); });
  }
  if (kind == "factorial") {
    const std::size_t depth = size_field(d, "depth", path);
    return rethrow_as_schema("$.depth", [&] { return gen_factorial(depth); });
  }
  if (kind == "squared-exponential") {
    const std::size_t depth = size_field(d, "depth", path);
    return rethrow_as_schema("$.depth", [&] { return gen_squared_exponential(depth); });
  }
  if (kind == "example-2-8") return ladder_from_descriptor(d).set;
  if (kind == "random-ladder") {
    const std::size_t depth = size_field(d, "depth", path);
    const json& seed = field(d, "seed", path);
    if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
      throw SchemaError("$.seed: expected an unsigned integer");
    }
    return rethrow_as_schema("$", [&] { return gen_random_ladder(seed.get<std::uint64_t>(), depth); });
  }
  if (kind == "explicit") {
    const json& pts = field(d, "log2_points", path);
    if (!pts.is_array()) throw SchemaError("$.log2_points: expected an array");
    if (pts.empty()) throw SchemaError("$.log2_points: empty set");
    std::vector<LogValue> values;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      values.push_back(LogValue::from_log2(rational_field(pts[i], "$.log2_points[" + std::to_string(i) + "]")));
    }
    bool contains_zero = true;
    if (d.contains("contains_zero")) {
      if (!d.at("contains_zero").is_boolean()) throw SchemaError("$.contains_zero: expected a boolean");
      contains_zero = d.at("contains_zero").get<bool>();
    }
    return ScaleSet::make(std::move(values), contains_zero);
  }
  throw SchemaError("$.kind: unknown set kind \"" + kind + "\"");
}

json to_descriptor(const ScaleSet& set) {
  json pts = json::array();
  for (const auto& p : set.points()) pts.push_back(to_string(p.log2()));
  return json{{"kind", "explicit"}, {"log2_points", pts}, {"contains_zero", set.contains_zero()}};
}

std::string trace_csv(const std::vector<LadderTraceRow>& trace) {
  std::ostringstream out;
  out << "n,log2_tau,class,nu,log2_tau_star\n";
  for (const auto& row : trace) {
    out << row.n << ',' << to_string(row.log2_tau) << ',' << row.cls << ',' << row.nu << ','
        << to_string(row.log2_tau_star) << '\n';
  }
  return out.str();
}

}  // namespace poros
