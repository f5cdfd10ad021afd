#include <catch_amalgamated.hpp>

#include "cli/commands.hpp"
#include "cli/descriptors.hpp"
#include "cli/manifest.hpp"

#include <poros/error.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace poros;
using namespace poros::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fresh_dir(const std::string& name) {
  const fs::path p = fs::path(POROS_TEST_TMP) / name;
  fs::remove_all(p);
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("sha256 digests") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("manifests seal and verify") {
  RunManifest m;
  m.config = {{"target", "example-2-8"}, {"depth", 40}};
  m.inputs = {{"target", "example-2-8"}};
  m.seal();
  CHECK(m.verify());
  CHECK(m.config_digest == sha256_hex(json{{"config", m.config}, {"inputs", m.inputs}}.dump()));
  const RunManifest back = RunManifest::from_json(m.to_json());
  CHECK(back.verify());
  CHECK(back.to_json() == m.to_json());
  m.config["depth"] = 41;
  CHECK_FALSE(m.verify());
  CHECK_THROWS_AS(RunManifest::from_json(json::array()), SchemaError);
}

TEST_CASE("set and space descriptors") {
  CHECK(parse_set("geometric:1/2:12", 40).set.depth() == 12);
  CHECK(parse_set("factorial", 9).set.depth() == 9);
  CHECK(parse_set("example-2-8:20", 40).ladder.has_value());
  CHECK(parse_set("random-ladder:3:16", 40).set.depth() == 16);
  CHECK_THROWS_AS(parse_set("bogus", 40), SchemaError);
  CHECK_THROWS_AS(parse_set("geometric", 40), SchemaError);
  CHECK_THROWS_AS(parse_set("factorial:x", 40), SchemaError);
  CHECK_THROWS_AS(parse_set("factorial:4:5", 40), SchemaError);

  const SetInput two = parse_set("example-2-8:20", 40);
  CHECK(parse_tau("tau", two).size() == two.ladder->tau().size());
  CHECK(parse_tau("stride:2:1", two).size() == two.set.depth() / 2);
  CHECK(parse_tau("[\"-1\", \"-3\"]", two).size() == 2);
  CHECK_THROWS_AS(parse_tau("tau", parse_set("factorial:10", 40)), SchemaError);
  CHECK_THROWS_AS(parse_tau("stride:2:2", two), SchemaError);
  CHECK_THROWS_AS(parse_tau("[1]", two), SchemaError);

  json canon;
  parse_space("star:3:factorial:10", 40, &canon);
  CHECK(canon.at("kind") == "star");
  CHECK(canon.at("rays") == 3);
  CHECK_THROWS_AS(parse_space("star:0:factorial:10", 40), SchemaError);
  CHECK_THROWS_AS(parse_space("distorted:-1:factorial:10", 40), SchemaError);
  CHECK_THROWS_AS(load_json("/nonexistent/file.json"), IoError);
}

TEST_CASE("porosity exit codes") {
  CHECK(run({"porosity", "--set", "geometric:1/2", "--criterion", "w", "--expect", "fails"}).code ==
        kExitOk);
  CHECK(run({"porosity", "--set", "geometric:1/2", "--criterion", "w", "--expect", "holds"}).code ==
        kExitMismatch);
  CHECK(run({"porosity", "--set", "geometric:1/2:4", "--criterion", "strong"}).code ==
        kExitInconclusive);
  CHECK(run({"porosity", "--set", "bogus", "--criterion", "w"}).code == kExitError);
  CHECK(run({"porosity", "--set", "factorial", "--criterion", "nonsense"}).code == kExitError);
  CHECK(run({"porosity", "--criterion", "w"}).code == kExitError);
  CHECK(run({}).code == kExitError);
  CHECK(run({"--version"}).code == kExitOk);
}

TEST_CASE("porosity writes reports") {
  const std::string dir = fresh_dir("porosity");
  const Run r = run({"porosity", "--set", "example-2-8:40", "--tau", "tau-star", "--criterion",
                     "w,tau,p+", "--expect", "holds,fails,holds", "--out", dir});
  CHECK(r.code == kExitOk);
  for (const char* f : {"w.json", "tau.json", "p_plus.json", "tau_scores.csv", "manifest.json"}) {
    CHECK(fs::exists(fs::path(dir) / f));
  }
  const json tau = json::parse(slurp(fs::path(dir) / "tau.json"));
  CHECK(tau.at("status") == "fails");
  CHECK_FALSE(tau.at("counterexample").empty());
  const std::string csv = slurp(fs::path(dir) / "tau_scores.csv");
  CHECK(csv.rfind("n,log2_tau_n,best_k,log2_K_star,log2_K_star_float\n", 0) == 0);
  const RunManifest m = RunManifest::from_json(json::parse(slurp(fs::path(dir) / "manifest.json")));
  CHECK(m.verify());
  CHECK(m.seed == 1);
}

TEST_CASE("pretangent exit codes") {
  const std::string dir = fresh_dir("pretangent");
  const Run ok = run({"pretangent", "--space", "factorial", "--trials", "10", "--out", dir});
  CHECK(ok.code == kExitOk);
  CHECK(fs::exists(fs::path(dir) / "experiment.json"));
  CHECK(fs::exists(fs::path(dir) / "experiment.csv"));
  const json rep = json::parse(slurp(fs::path(dir) / "experiment.json"));
  CHECK(rep.at("summary").at("agreement") == "agree");

  CHECK(run({"pretangent", "--space", "distorted:4:geometric:1/2", "--trials", "4"}).code ==
        kExitError);
  CHECK(run({"pretangent", "--space", "single-point", "--trials", "4"}).code == kExitOk);
  CHECK(run({"pretangent", "--space", "factorial", "--config", "{\"depth\": 2}"}).code ==
        kExitError);
}

TEST_CASE("reproduce and manifest reruns") {
  const std::string dir = fresh_dir("reproduce");
  const Run first = run({"reproduce", "example-2-8", "--out", dir});
  CHECK(first.code == kExitOk);
  CHECK(first.out.find("result: match") != std::string::npos);
  const fs::path report = fs::path(dir) / "example-2-8.txt";
  const fs::path manifest = fs::path(dir) / "example-2-8.manifest.json";
  REQUIRE(fs::exists(report));
  REQUIRE(fs::exists(manifest));

  const std::string dir2 = fresh_dir("reproduce2");
  const Run again = run({"reproduce", "--manifest", manifest.string(), "--out", dir2});
  CHECK(again.code == kExitOk);
  CHECK(slurp(report) == slurp(fs::path(dir2) / "example-2-8.txt"));

  json tampered = json::parse(slurp(manifest));
  tampered["config"]["depth"] = 30;
  const fs::path bad = fs::path(dir) / "tampered.json";
  std::ofstream(bad) << tampered.dump();
  CHECK(run({"reproduce", "--manifest", bad.string()}).code == kExitError);
  CHECK(run({"reproduce", "no-such-target"}).code == kExitError);
  CHECK(run({"reproduce", "--manifest", "/nonexistent.json"}).code == kExitError);
}
