#include "cli/reproduce.hpp"

#include "cli/descriptors.hpp"

#include <poros/error.hpp>
#include <poros/experiment.hpp>
#include <poros/generators.hpp>
#include <poros/porosity.hpp>

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace poros::cli {

namespace {

using nlohmann::json;

class Report {
 public:
  void heading(const std::string& text) { out_ << "\n## " << text << "\n"; }

  void row(const std::string& key, const std::string& expected, const std::string& got) {
    ++rows_;
    if (expected == got) {
      out_ << "  " << key << ": " << got << "\n";
      return;
    }
    ++mismatches_;
    out_ << "- " << key << ": " << expected << "\n";
    out_ << "+ " << key << ": " << got << "\n";
  }

  // For checks whose expectation is a predicate rather than a value.
  void check(const std::string& key, bool ok, const std::string& got,
             const std::string& expected_desc) {
    row(key, ok ? got : expected_desc, got);
  }

  ReproduceResult finish(std::ostringstream& head) {
    head << out_.str() << "\nresult: ";
    if (mismatches_ == 0) {
      head << "match (" << rows_ << " rows)\n";
    } else {
      head << "mismatch (" << mismatches_ << " of " << rows_ << " rows)\n";
    }
    return {head.str(), rows_, mismatches_};
  }

 private:
  std::ostringstream out_;
  std::size_t rows_ = 0;
  std::size_t mismatches_ = 0;
};

std::string fixed(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string status(const PorosityVerdict& v) { return std::string(to_string(v.status)); }

PosSeq as_seq(std::vector<LogValue> terms, std::string label) {
  PosSeq s;
  s.terms = std::move(terms);
  s.label = std::move(label);
  return s;
}

void example_2_8(Report& rep, std::size_t depth) {
  const TwoLadderSet L = gen_example_2_8(depth);
  rep.heading("ladder trace, depth " + std::to_string(depth));
  for (const LadderTraceRow& r : L.trace) {
    const long long n = static_cast<long long>(r.n);
    const Rational closed(-(n - 1) * n * (2 * n - 1), 6);
    rep.row("log2 tau[" + std::to_string(r.n) + "]", to_string(closed), to_string(r.log2_tau));
  }

  rep.heading("chain tau[n+1] <= 2^-n tau[n] <= tau*[n] < tau[n]");
  for (std::size_t i = 1; i + 1 < L.trace.size(); ++i) {
    const LadderTraceRow& r = L.trace[i];
    const Rational n(static_cast<long long>(r.n));
    const bool ok = L.trace[i + 1].log2_tau <= r.log2_tau - n && r.log2_tau - n <= r.log2_tau_star &&
                    r.log2_tau_star < r.log2_tau;
    rep.row("n = " + std::to_string(r.n), "holds", ok ? "holds" : "fails");
  }

  rep.heading("ratio tau[n+1] / tau*[n]");
  std::optional<Rational> prev;
  for (std::size_t i = 1; i + 1 < L.trace.size(); ++i) {
    const LadderTraceRow& r = L.trace[i];
    const Rational lr = L.trace[i + 1].log2_tau - r.log2_tau_star;
    const Rational n(static_cast<long long>(r.n));
    const bool bound = lr <= -n * n + n;
    const bool decay = !prev || lr < *prev;
    rep.row("n = " + std::to_string(r.n) + " log2 ratio " + to_string(lr),
            "bounded, decreasing",
            std::string(bound ? "bounded" : "unbounded") + ", " +
                (decay ? "decreasing" : "not decreasing"));
    prev = lr;
  }
  rep.row("generator self-checks", "pass", L.checks.all() ? "pass" : "fail");

  rep.heading("porosity verdicts");
  const PorosityParams params;
  const PosSeq all = enumerate_points(L.set);
  const PosSeq tau = as_seq(L.tau(), "tau");
  const PosSeq star = as_seq(L.tau_star(), "tau*");
  rep.row("strong", "holds", status(is_strongly_porous(L.set, params.strong_tol, params)));
  rep.row("w", "holds", status(w_porosity(L.set, params)));
  rep.row("complete", "fails", status(completely_strong_porosity(L.set, default_pool(L.set), params)));
  rep.row("tau (enumeration), k-grid", "fails", status(tau_strong_porosity(L.set, all, params)));
  rep.row("tau (enumeration), gaps", "fails", status(tau_strong_porosity_gaps(L.set, all, params)));
  rep.row("porous subsequence of the enumeration", "holds",
          status(porous_subsequence_search(L.set, all, params)));
  rep.row("tau (tau), k-grid", "holds", status(tau_strong_porosity(L.set, tau, params)));
  rep.row("tau (tau), gaps", "holds", status(tau_strong_porosity_gaps(L.set, tau, params)));
  const PorosityVerdict vs = tau_strong_porosity(L.set, star, params);
  rep.row("tau (tau*), k-grid", "fails", status(vs));
  rep.row("tau (tau*), gaps", "fails", status(tau_strong_porosity_gaps(L.set, star, params)));
  std::string cex;
  std::set<std::size_t> classes;
  for (std::size_t p : vs.counterexample) {
    cex += (cex.empty() ? "" : " ") + std::to_string(p + 1);
    classes.insert(L.trace.at(p).cls);
  }
  if (depth == 40) {
    rep.row("tau (tau*) counterexample positions", "22 26 30 34 38", cex);
  } else {
    rep.check("tau (tau*) counterexample positions", !cex.empty(), cex, "present");
  }
  rep.row("counterexample within one partition class", "yes",
          classes.size() == 1 ? "yes" : "no");
}

void remark_2_11(Report& rep, std::size_t depth, const ExperimentConfig& config) {
  const TwoLadderSet L = gen_example_2_8(depth);
  const HalfLineSpace space(L.set);
  const ExperimentReport r = boundedness_experiment(space, config);
  rep.heading("pretangent spaces over the two-ladder set, depth " + std::to_string(depth));
  std::size_t built = 0;
  for (const ExperimentRow& row : r.rows) {
    const std::string key = "run " + std::to_string(row.run_id) + " " + row.r_descriptor;
    if (row.status != "ok") {
      rep.row(key, "not built: " + row.status, "not built: " + row.status);
      continue;
    }
    ++built;
    const std::string got = std::to_string(row.class_count) + " classes";
    rep.check(key, row.class_count <= 3, got, "at most 3 classes");
  }
  rep.check("spaces built", built >= 100, std::to_string(built), "at least 100");
  rep.row("max class count <= 3", "yes", r.max_class_count <= 3 ? "yes" : "no");
}

struct SuiteEntry {
  std::string space;
  std::string w;
  std::string observation;
};

void theorem_suite(Report& rep, std::size_t depth, const ExperimentConfig& config) {
  const std::string d = ":" + std::to_string(depth);
  const std::string half = ":" + std::to_string(depth / 2);
  const std::vector<SuiteEntry> corpus = {
      {"geometric:1/2" + d, "fails", "unbounded"},
      {"factorial" + d, "holds", "bounded"},
      {"squared-exponential" + d, "holds", "bounded"},
      {"example-2-8" + half, "holds", "bounded"},
      {"example-2-8" + d, "holds", "bounded"},
      {"star:3:geometric:1/2" + d, "fails", "unbounded"},
      {"star:3:factorial" + d, "holds", "bounded"},
  };
  std::optional<double> diam_half, diam_full;
  for (const SuiteEntry& e : corpus) {
    rep.heading(e.space);
    const auto space = parse_space(e.space, depth);
    const ExperimentReport r = boundedness_experiment(*space, config);
    rep.row("w", e.w, std::string(to_string(r.w_status)));
    rep.row("observation", e.observation, r.observation);
    rep.row("agreement", "agree", r.agreement);
    rep.row("diameter inequality violations", "0", std::to_string(r.inequality_violations));
    rep.row("max diameter", fixed(r.max_diameter), fixed(r.max_diameter));
    if (e.space == "example-2-8" + half) diam_half = r.max_diameter;
    if (e.space == "example-2-8" + d) diam_full = r.max_diameter;
  }
  rep.heading("depth doubling");
  const bool stable = diam_half && diam_full &&
                      std::fabs(*diam_half - *diam_full) <= 2 * config.tol();
  rep.row("two-ladder max diameter stable", "yes", stable ? "yes" : "no");
}

std::size_t get_size(const json& c, const char* key) {
  auto it = c.find(key);
  if (it == c.end() || !it->is_number_integer() || it->get<std::int64_t>() < 0) {
    throw SchemaError(std::string("$.config.") + key + ": expected an unsigned integer");
  }
  return it->get<std::size_t>();
}

}  // namespace

const std::vector<std::string>& reproduce_targets() {
  static const std::vector<std::string> t = {"example-2-8", "remark-2-11", "theorem-2-4-suite"};
  return t;
}

json reproduce_config(const std::string& target) {
  bool known = false;
  for (const auto& t : reproduce_targets()) known = known || t == target;
  if (!known) throw SchemaError("unknown reproduce target \"" + target + "\"");
  return {{"target", target}, {"depth", 40}, {"seed", 1}, {"trials", 100}};
}

ReproduceResult run_reproduce(const json& config, const std::string& tool_version) {
  if (!config.is_object() || !config.contains("target") || !config["target"].is_string()) {
    throw SchemaError("$.config.target: expected a string");
  }
  const std::string target = config["target"].get<std::string>();
  reproduce_config(target);
  const std::size_t depth = get_size(config, "depth");
  ExperimentConfig ec;
  ec.seed = get_size(config, "seed");
  ec.trials = get_size(config, "trials");

  std::ostringstream head;
  head << "# reproduce " << target << "\n";
  head << "# depth " << depth << ", seed " << ec.seed << ", trials " << ec.trials << ", tool "
       << tool_version << "\n";
  Report rep;
  if (target == "example-2-8") {
    example_2_8(rep, depth);
  } else if (target == "remark-2-11") {
    remark_2_11(rep, depth, ec);
  } else {
    theorem_suite(rep, depth, ec);
  }
  return rep.finish(head);
}

}  // namespace poros::cli
