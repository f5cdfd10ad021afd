#include "cli/commands.hpp"

#include "cli/descriptors.hpp"
#include "cli/manifest.hpp"
#include "cli/reports.hpp"
#include "cli/reproduce.hpp"

#include <poros/error.hpp>
#include <poros/experiment.hpp>
#include <poros/porosity.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <optional>

#ifndef POROS_VERSION
#define POROS_VERSION "0.0.0"
#endif

namespace poros::cli {

namespace {

using nlohmann::json;

const std::vector<std::string> kCriteria = {"lambda", "p+", "strong", "tau", "w", "complete"};

struct PorosityOptions {
  std::string set;
  std::vector<std::string> criteria;
  std::string tau = "enumeration";
  std::size_t depth = 40;
  int tol_log2 = -16;
  std::string window = "1/2";
  std::uint64_t seed = 1;
  std::vector<std::string> expect;
  std::string out_dir;
  std::string format = "json";
  std::string h_log2 = "0";
};

struct PretangentOptions {
  std::string space;
  std::string config;
  std::size_t depth = 40;
  std::optional<std::uint64_t> seed;
  std::optional<int> tol_log2;
  std::optional<std::size_t> trials;
  std::string out_dir;
  std::string format = "json";
};

struct ReproduceOptions {
  std::string target;
  std::string manifest;
  std::string out_dir;
};

std::string join_path(const std::string& dir, const std::string& file) {
  return dir.empty() ? file : dir + "/" + file;
}

std::string file_stem(const std::string& criterion) {
  return criterion == "p+" ? "p_plus" : criterion;
}

Rational parse_window(const std::string& text) {
  const Rational w = parse_rational(text);
  if (w <= 0 || w > 1) throw SchemaError("--window must lie in (0, 1]");
  return w;
}

// One criterion: the verdict plus fields that only make sense for it.
struct Evaluation {
  PorosityVerdict verdict;
  json extra = json::object();
};

Evaluation evaluate(const std::string& criterion, const SetInput& input,
                    const PorosityOptions& o, const PorosityParams& params) {
  Evaluation e;
  PorosityVerdict& v = e.verdict;
  const ScaleSet& set = input.set;
  if (criterion == "lambda") {
    const Rational h = parse_rational(o.h_log2);
    const LambdaResult r = lambda0h(set, LogValue::from_log2(h), params.precision_bits);
    v.criterion = "lambda";
    v.status = r.conclusive ? Status::holds : Status::inconclusive;
    v.diagnostics["log2_h"] = h;
    if (r.length) {
      v.diagnostics["log2_lambda"] = r.length->log2();
    } else {
      v.notes.push_back("no empty subinterval of (0, h)");
    }
    if (!r.conclusive) v.notes.push_back("unresolved region below the truncation");
  } else if (criterion == "p+") {
    const RightPorosity r = right_porosity(set, params);
    v.criterion = "p+";
    v.status = r.conclusive ? Status::holds : Status::inconclusive;
    v.diagnostics["log2_estimate"] = r.log2_estimate;
    v.notes.push_back("trend " + std::string(to_string(r.trend)));
    e.extra["estimate"] = r.estimate;
    e.extra["early_sup"] = r.early_sup;
    e.extra["late_sup"] = r.late_sup;
  } else if (criterion == "strong") {
    v = is_strongly_porous(set, params.strong_tol, params);
  } else if (criterion == "tau") {
    const PosSeq tau = parse_tau(o.tau, input);
    v = tau_strong_porosity(set, tau, params);
    const PorosityVerdict g = tau_strong_porosity_gaps(set, tau, params);
    const PorosityVerdict s = porous_subsequence_search(set, tau, params);
    e.extra["tau"] = o.tau;
    e.extra["gap_route"] = verdict_json(g, "");
    e.extra["porous_subsequence"] = verdict_json(s, "");
    const bool split = (v.status == Status::holds && g.status == Status::fails) ||
                       (v.status == Status::fails && g.status == Status::holds);
    if (split) v.notes.push_back("k-grid and gap routes disagree");
  } else if (criterion == "w") {
    v = w_porosity(set, params);
  } else {
    v = completely_strong_porosity(set, default_pool(set), params);
  }
  return e;
}

int cmd_porosity(const PorosityOptions& o, const std::vector<std::string>& argv,
                 std::ostream& out) {
  if (o.criteria.empty()) throw SchemaError("--criterion: at least one criterion is required");
  if (!o.expect.empty() && o.expect.size() != 1 && o.expect.size() != o.criteria.size()) {
    throw SchemaError("--expect: give one value or one per criterion");
  }
  const SetInput input = parse_set(o.set, o.depth);
  PorosityParams params;
  params.window_fraction = parse_window(o.window);
  if (o.tol_log2 > 0) throw SchemaError("--tol-log2 must be <= 0");
  params.strong_tol = Rational(1) / Rational(Integer(1) << -o.tol_log2);

  RunManifest manifest;
  manifest.command_line = argv;
  manifest.config = {{"criteria", o.criteria}, {"tau", o.tau},       {"depth", o.depth},
                     {"tol_log2", o.tol_log2}, {"window", o.window}, {"seed", o.seed},
                     {"expect", o.expect},     {"h_log2", o.h_log2}};
  manifest.inputs = {{"set", input.descriptor}};
  manifest.seed = o.seed;
  manifest.tool_version = tool_version();

  bool mismatch = false;
  bool inconclusive = false;
  json verdicts = json::array();
  std::string summary = "criterion,status,expected\n";
  for (std::size_t i = 0; i < o.criteria.size(); ++i) {
    const std::string& c = o.criteria[i];
    Evaluation e = evaluate(c, input, o, params);
    const std::string status(to_string(e.verdict.status));
    std::string expected;
    if (!o.expect.empty()) expected = o.expect.size() == 1 ? o.expect[0] : o.expect[i];
    if (!expected.empty() && expected != status) mismatch = true;
    if (e.verdict.status == Status::inconclusive) inconclusive = true;

    std::string csv_path;
    if (!o.out_dir.empty()) {
      csv_path = join_path(o.out_dir, file_stem(c) + "_scores.csv");
      write_file(csv_path, scores_csv(e.verdict.scores));
    }
    json j = verdict_json(e.verdict, csv_path);
    j["criterion"] = c;
    for (auto& [k, val] : e.extra.items()) j[k] = val;
    if (!expected.empty()) j["expected"] = expected;
    if (!o.out_dir.empty()) {
      const std::string path = join_path(o.out_dir, file_stem(c) + ".json");
      write_file(path, dump(j));
      manifest.outputs.push_back(path);
      manifest.outputs.push_back(csv_path);
    }
    summary += c + "," + status + "," + expected + "\n";
    verdicts.push_back(std::move(j));
  }
  if (!o.out_dir.empty()) {
    const std::string path = join_path(o.out_dir, "manifest.json");
    manifest.outputs.push_back(path);
    manifest.seal();
    write_file(path, dump(manifest.to_json()));
  }
  if (o.format == "csv") {
    out << summary;
  } else {
    out << dump({{"set", input.descriptor}, {"verdicts", verdicts}});
  }
  if (mismatch) return kExitMismatch;
  if (inconclusive) return kExitInconclusive;
  return kExitOk;
}

int cmd_pretangent(const PretangentOptions& o, const std::vector<std::string>& argv,
                   std::ostream& out) {
  ExperimentConfig config =
      o.config.empty() ? ExperimentConfig{} : ExperimentConfig::from_json(load_json(o.config));
  if (o.seed) config.seed = *o.seed;
  if (o.tol_log2) config.tol_log2 = *o.tol_log2;
  if (o.trials) config.trials = *o.trials;
  json canonical;
  const auto space = parse_space(o.space, o.depth, &canonical);
  const ExperimentReport report = boundedness_experiment(*space, config);

  json j = report.to_json();
  if (!o.out_dir.empty()) {
    RunManifest manifest;
    manifest.command_line = argv;
    manifest.config = config.to_json();
    manifest.inputs = {{"space", canonical}};
    manifest.seed = config.seed;
    manifest.tool_version = tool_version();
    const std::string json_path = join_path(o.out_dir, "experiment.json");
    const std::string csv_path = join_path(o.out_dir, "experiment.csv");
    const std::string manifest_path = join_path(o.out_dir, "manifest.json");
    write_file(json_path, dump(j));
    write_file(csv_path, report.to_csv());
    manifest.outputs = {json_path, csv_path, manifest_path};
    manifest.seal();
    write_file(manifest_path, dump(manifest.to_json()));
  }
  out << (o.format == "csv" ? report.to_csv() : dump(j));
  return report.agreement == "disagree" ? kExitMismatch : kExitOk;
}

int cmd_reproduce(const ReproduceOptions& o, const std::vector<std::string>& argv,
                  std::ostream& out, std::ostream& err) {
  RunManifest manifest;
  if (!o.manifest.empty()) {
    manifest = RunManifest::from_json(load_json(o.manifest));
    if (!manifest.verify()) throw SchemaError("$.config_digest: does not match config and inputs");
    if (!o.target.empty() && manifest.config.value("target", "") != o.target) {
      throw SchemaError("$.config.target: manifest is for another target");
    }
    if (manifest.tool_version != tool_version()) {
      err << "warning: manifest written by version " << manifest.tool_version << "\n";
    }
  } else {
    if (o.target.empty()) throw SchemaError("reproduce: a target or --manifest is required");
    manifest.config = reproduce_config(o.target);
    manifest.inputs = {{"target", o.target}};
    manifest.seed = manifest.config["seed"].get<std::uint64_t>();
  }
  const ReproduceResult r = run_reproduce(manifest.config, tool_version());
  if (!o.out_dir.empty()) {
    manifest.command_line = argv;
    manifest.tool_version = tool_version();
    const std::string target = manifest.config["target"].get<std::string>();
    const std::string report_path = join_path(o.out_dir, target + ".txt");
    const std::string manifest_path = join_path(o.out_dir, target + ".manifest.json");
    write_file(report_path, r.report);
    manifest.outputs = {report_path, manifest_path};
    manifest.seal();
    write_file(manifest_path, dump(manifest.to_json()));
  }
  out << r.report;
  return r.mismatches == 0 ? kExitOk : kExitMismatch;
}

}  // namespace

std::string tool_version() { return POROS_VERSION; }

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Porosity verdicts and pretangent experiments for subsets of the half-line",
               "poros"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());

  PorosityOptions po;
  CLI::App* porosity = app.add_subcommand("porosity", "Decide porosity criteria for a set");
  porosity->add_option("--set", po.set, "Set descriptor")->required();
  porosity->add_option("--criterion", po.criteria, "Criteria to decide")
      ->required()
      ->delimiter(',')
      ->check(CLI::IsMember(kCriteria));
  porosity->add_option("--tau", po.tau, "Sequence for the tau criterion")
      ->capture_default_str();
  porosity->add_option("--depth", po.depth, "Depth for short set descriptors")
      ->capture_default_str();
  porosity->add_option("--tol-log2", po.tol_log2, "log2 of the strong-porosity tolerance")
      ->capture_default_str();
  porosity->add_option("--window", po.window, "Tail window fraction")->capture_default_str();
  porosity->add_option("--seed", po.seed, "Seed recorded in the manifest")
      ->capture_default_str();
  porosity->add_option("--expect", po.expect, "Expected status, one or one per criterion")
      ->delimiter(',')
      ->check(CLI::IsMember({"holds", "fails", "inconclusive"}));
  porosity->add_option("--h-log2", po.h_log2, "log2 of h for lambda")->capture_default_str();
  porosity->add_option("--out", po.out_dir, "Directory for verdict JSON, scores CSV, manifest");
  porosity->add_option("--format", po.format, "Standard output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  PretangentOptions pt;
  CLI::App* pretangent =
      app.add_subcommand("pretangent", "Compare w-porosity with pretangent boundedness");
  pretangent->add_option("--space", pt.space, "Space descriptor")->required();
  pretangent->add_option("--config", pt.config, "Experiment config (JSON text or path)");
  pretangent->add_option("--depth", pt.depth, "Depth for short set descriptors")
      ->capture_default_str();
  pretangent->add_option("--seed", pt.seed, "Override the config seed");
  pretangent->add_option("--tol-log2", pt.tol_log2, "Override the config tolerance");
  pretangent->add_option("--trials", pt.trials, "Override the number of normalizing sequences");
  pretangent->add_option("--out", pt.out_dir, "Directory for the report and manifest");
  pretangent->add_option("--format", pt.format, "Standard output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  ReproduceOptions ro;
  CLI::App* reproduce = app.add_subcommand("reproduce", "Run a canned target against pinned rows");
  reproduce->add_option("target", ro.target, "Target")->check(CLI::IsMember(reproduce_targets()));
  reproduce->add_option("--manifest", ro.manifest, "Rerun from a manifest");
  reproduce->add_option("--out", ro.out_dir, "Directory for the report and manifest");

  std::vector<std::string> argv{"poros"};
  argv.insert(argv.end(), args.begin(), args.end());
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitError;
  }

  try {
    if (porosity->parsed()) return cmd_porosity(po, argv, out);
    if (pretangent->parsed()) return cmd_pretangent(pt, argv, out);
    return cmd_reproduce(ro, argv, out, err);
  } catch (const MetricAxiomError& e) {
    err << "metric axiom violation: " << e.what() << "\n";
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitError;
}

}  // namespace poros::cli
