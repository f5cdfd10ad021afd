#include "cli/manifest.hpp"

#include <poros/error.hpp>

#include <openssl/evp.h>

#include <array>
#include <cstdio>

namespace poros::cli {

using nlohmann::json;

std::string sha256_hex(const std::string& data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    char buf[3];
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

std::string RunManifest::compute_digest() const {
  // json objects keep keys sorted, so dump() is canonical.
  return sha256_hex(json{{"config", config}, {"inputs", inputs}}.dump());
}

void RunManifest::seal() { config_digest = compute_digest(); }

bool RunManifest::verify() const { return config_digest == compute_digest(); }

json RunManifest::to_json() const {
  return {{"command_line", command_line}, {"config", config},         {"inputs", inputs},
          {"config_digest", config_digest}, {"seed", seed},           {"tool_version", tool_version},
          {"outputs", outputs}};
}

RunManifest RunManifest::from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("$: manifest must be an object");
  RunManifest m;
  auto field = [&](const char* key, json::value_t type) -> const json* {
    auto it = j.find(key);
    if (it == j.end()) return nullptr;
    const bool ok = it->type() == type ||
                    (type == json::value_t::number_unsigned && it->is_number_integer() &&
                     it->get<std::int64_t>() >= 0);
    if (!ok) throw SchemaError(std::string("$.") + key + ": wrong type");
    return &*it;
  };
  auto strings = [&](const char* key, std::vector<std::string>& out) {
    if (const json* a = field(key, json::value_t::array)) {
      for (std::size_t i = 0; i < a->size(); ++i) {
        if (!(*a)[i].is_string()) {
          throw SchemaError(std::string("$.") + key + "[" + std::to_string(i) + "]: expected a string");
        }
        out.push_back((*a)[i].get<std::string>());
      }
    }
  };
  strings("command_line", m.command_line);
  strings("outputs", m.outputs);
  if (const json* c = field("config", json::value_t::object)) m.config = *c;
  if (const json* c = field("inputs", json::value_t::object)) m.inputs = *c;
  if (const json* c = field("config_digest", json::value_t::string)) m.config_digest = c->get<std::string>();
  if (const json* c = field("seed", json::value_t::number_unsigned)) m.seed = c->get<std::uint64_t>();
  if (const json* c = field("tool_version", json::value_t::string)) m.tool_version = c->get<std::string>();
  return m;
}

}  // namespace poros::cli
