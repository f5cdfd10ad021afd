#include "cli/reports.hpp"

#include <poros/error.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace poros::cli {

namespace {

using nlohmann::json;

std::string fmt(double x) {
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

void put_rational(json& j, const std::string& key, const Rational& value) {
  j[key] = to_string(value);
  j[key + "_float"] = to_double(value);
}

}  // namespace

json verdict_json(const PorosityVerdict& v, const std::string& scores_csv_path) {
  json j;
  j["criterion"] = v.criterion;
  j["status"] = std::string(to_string(v.status));
  if (v.witness) {
    const WitnessGaps& w = *v.witness;
    if (w.k) put_rational(j, "log2_k", w.k->log2());
    put_rational(j, "c1", w.c1);
    put_rational(j, "c2", w.c2);
    json gaps = json::array();
    for (const Gap& g : w.gaps) {
      gaps.push_back({to_string(g.a.log2()), to_string(g.b.log2())});
    }
    j["witness_gaps"] = std::move(gaps);
    j["witness_indices"] = w.indices;
    j["witness_valid"] = w.valid;
  }
  j["counterexample"] = v.counterexample;
  if (!v.subsequence.empty()) j["subsequence"] = v.subsequence;
  json diag = json::object();
  for (const auto& [key, value] : v.diagnostics) put_rational(diag, key, value);
  j["diagnostics"] = std::move(diag);
  j["notes"] = v.notes;
  if (!scores_csv_path.empty()) j["scores_csv"] = scores_csv_path;
  return j;
}

std::string scores_csv(const std::vector<ScoreRow>& rows) {
  std::ostringstream out;
  out << "n,log2_tau_n,best_k,log2_K_star,log2_K_star_float\n";
  for (const ScoreRow& r : rows) {
    out << r.n << ',' << to_string(r.log2_tau) << ',';
    if (r.log2_best_k) out << to_string(*r.log2_best_k);
    out << ',';
    if (r.log2_k_star) {
      out << to_string(*r.log2_k_star) << ',' << fmt(to_double(*r.log2_k_star));
    } else {
      out << ',';
    }
    out << '\n';
  }
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace poros::cli
