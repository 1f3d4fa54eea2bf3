#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace {

std::string env_or_fail(const char* name) {
  const char* v = std::getenv(name);
  REQUIRE_MESSAGE(v != nullptr, name);
  return v;
}

std::string cli() { return env_or_fail("CSYS_CLI"); }
std::string tmpdir() { return env_or_fail("CSYS_TMP"); }

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Runs the CLI with the given arguments; returns the exit code.
int run(const std::string& args) {
  std::string cmd = cli() + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WEXITSTATUS(rc);
}

std::string unit_config_path() {
  std::string p = tmpdir() + "/cli_unit.json";
  write_file(p, "{\"kind\":\"unit\"}");
  return p;
}

}  // namespace

TEST_CASE("cli: check on the unit instance exits 0 and writes valid JSON") {
  std::string out = tmpdir() + "/cli_check.json";
  int rc = run("check --instance " + unit_config_path() + " --max-len 4 --format json --out " +
               out);
  CHECK(rc == 0);
  nlohmann::json j = nlohmann::json::parse(read_file(out));
  CHECK(j.at("totals").at("fail") == 0);
  for (const auto& suite : j.at("suites")) {
    CHECK(suite.contains("suite"));
    for (const auto& check : suite.at("checks")) {
      CHECK(check.contains("name"));
      CHECK(check.contains("status"));
      CHECK(check.contains("counterexamples"));
      CHECK(check.contains("cases"));
    }
  }
}

TEST_CASE("cli: corrupted instance exits 1") {
  std::string cfg = tmpdir() + "/cli_mutated.json";
  write_file(cfg,
             "{\"kind\":\"mutated\",\"base\":{\"kind\":\"context\",\"base_sizes\":[2,2]},"
             "\"mutation\":\"permute_sf\"}");
  CHECK(run("check --instance " + cfg + " --max-len 2") == 1);
}

TEST_CASE("cli: usage and parse errors exit 2") {
  CHECK(run("") == 2);                                   // missing subcommand
  CHECK(run("frobnicate") == 2);                         // unknown subcommand
  CHECK(run("check") == 2);                              // missing --instance
  CHECK(run("check --instance /does/not/exist.json") == 2);
  CHECK(run("check --instance " + unit_config_path() + " --format yaml") == 2);
  std::string bad = tmpdir() + "/cli_bad.json";
  write_file(bad, "{not json");
  CHECK(run("check --instance " + bad) == 2);
}

TEST_CASE("cli: close with the empty seed dumps the minimal window") {
  std::string out = tmpdir() + "/cli_close.json";
  int rc = run("close --instance " + unit_config_path() + " --max-len 3 --format json --out " +
               out);
  CHECK(rc == 0);
  nlohmann::json j = nlohmann::json::parse(read_file(out));
  REQUIRE(j.at("window").at("B").size() == 1);
  CHECK(j["window"].at("saturated_within_window") == true);
  CHECK(j.at("suites").at("totals").at("fail") == 0);
}

TEST_CASE("cli: close with a malformed seed exits 2") {
  std::string seed = tmpdir() + "/cli_seed_bad.json";
  write_file(seed, "{\"objects\":[\"no-such-object\"]}");
  CHECK(run("close --instance " + unit_config_path() + " --seed " + seed) == 2);
}

TEST_CASE("cli: quotient of the discrete relation exits 0 with a dump") {
  std::string cfg = tmpdir() + "/cli_ctx22.json";
  write_file(cfg, "{\"kind\":\"context\",\"base_sizes\":[2,2]}");
  std::string rel = tmpdir() + "/cli_rel.json";
  write_file(rel, "{}");
  std::string out = tmpdir() + "/cli_quotient.json";
  int rc = run("quotient --instance " + cfg + " --max-len 2 --relation " + rel +
               " --format json --out " + out);
  CHECK(rc == 0);
  nlohmann::json j = nlohmann::json::parse(read_file(out));
  CHECK(j.at("suites").at("totals").at("fail") == 0);
  CHECK(j.at("quotient").at("objects").size() == 3);
}

TEST_CASE("cli: length-mismatched relation exits 1 with the closure failure") {
  std::string cfg = tmpdir() + "/cli_ctx22b.json";
  write_file(cfg, "{\"kind\":\"context\",\"base_sizes\":[2,2]}");
  std::string rel = tmpdir() + "/cli_rel_bad.json";
  write_file(rel, "{\"ob_pairs\":[[\"[]\",\"[0]\"]]}");
  std::string out = tmpdir() + "/cli_quotient_bad.json";
  int rc = run("quotient --instance " + cfg + " --max-len 2 --relation " + rel +
               " --format json --out " + out);
  CHECK(rc == 1);
  nlohmann::json j = nlohmann::json::parse(read_file(out));
  CHECK(j.at("suites").at("totals").at("fail").get<int>() > 0);
}

TEST_CASE("cli: text format is the default and prints suite lines") {
  std::string out = tmpdir() + "/cli_text.txt";
  int rc = run("check --instance " + unit_config_path() + " --max-len 4 --out " + out);
  CHECK(rc == 0);
  std::string text = read_file(out);
  CHECK(text.find("suite axioms") != std::string::npos);
  CHECK(text.find("totals:") != std::string::npos);
}
