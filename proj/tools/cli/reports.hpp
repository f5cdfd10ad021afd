#pragma once

#include <poros/porosity.hpp>

#include <json.hpp>

#include <string>
#include <vector>

namespace poros::cli {

/// {"criterion", "status", "k", "c1", "c2", "witness_gaps": [[a_log2, b_log2]...],
///  "scores_csv", ...}. Log2 quantities are exact "p/q" strings; every one
/// has a *_float companion.
nlohmann::json verdict_json(const PorosityVerdict& v, const std::string& scores_csv_path);

/// n,log2_tau_n,best_k,log2_K_star,log2_K_star_float. best_k is given by its
/// log2; empty cells mark terms whose K* lies beyond the window.
std::string scores_csv(const std::vector<ScoreRow>& rows);

/// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_file(const std::string& path, const std::string& content);

/// Pretty-printed JSON with a trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace poros::cli
