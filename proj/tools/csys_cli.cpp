// Command-line front end. Links only the C API.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "csys/capi.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string instance_path;
  std::string seed_path;
  std::string relation_path;
  std::uint32_t max_len = 3;
  std::uint64_t point_cap = 8;
  std::uint64_t hom_cap = 4096;
  std::uint64_t rng_seed = 0;
  bool max_len_set = false;
  bool point_cap_set = false;
  bool hom_cap_set = false;
  bool rng_seed_set = false;
  std::string format = "text";
  std::string out_path;
};

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

/// For suite-all only explicitly passed flags override the per-fixture
/// budgets; for the single-instance commands the defaults apply as-is.
std::string budget_json(const Options& o, bool overrides_only) {
  std::ostringstream ss;
  ss << "{";
  const char* sep = "";
  auto field = [&](const char* name, std::uint64_t v, bool set) {
    if (overrides_only && !set) return;
    ss << sep << "\"" << name << "\":" << v;
    sep = ",";
  };
  field("max_len", o.max_len, o.max_len_set);
  field("point_cap", o.point_cap, o.point_cap_set);
  field("hom_cap", o.hom_cap, o.hom_cap_set);
  field("rng_seed", o.rng_seed, o.rng_seed_set);
  ss << "}";
  return ss.str();
}

int emit(const Options& o, const char* text) {
  if (text == nullptr) return kExitOk;
  if (o.out_path.empty()) {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream out(o.out_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << o.out_path << "\n";
    return kExitUsage;
  }
  out << text;
  return kExitOk;
}

int map_status(int rc) {
  switch (rc) {
    case CSYS_OK: return kExitOk;
    case CSYS_CHECK_FAILED: return kExitCheckFailed;
    default: return kExitUsage;
  }
}

csys_instance* load_instance(const Options& o) {
  if (o.instance_path.empty()) {
    std::cerr << "error: --instance is required for this command\n";
    return nullptr;
  }
  std::string config;
  if (!read_file(o.instance_path, config)) {
    std::cerr << "error: cannot read " << o.instance_path << "\n";
    return nullptr;
  }
  char* err = nullptr;
  csys_instance* inst = csys_instance_create(config.c_str(), &err);
  if (!inst) {
    std::cerr << "error: " << (err ? err : "invalid instance config") << "\n";
    csys_free(err);
  }
  return inst;
}

int run_command(const std::string& cmd, const Options& o) {
  int fmt = o.format == "json" ? CSYS_FORMAT_JSON : CSYS_FORMAT_TEXT;
  char* out = nullptr;
  char* err = nullptr;
  int rc = CSYS_INTERNAL_ERROR;

  if (cmd == "suite-all") {
    std::string b = budget_json(o, /*overrides_only=*/true);
    rc = csys_run_suite_all(b.c_str(), fmt, &out, &err);
  } else {
    csys_instance* inst = load_instance(o);
    if (!inst) return kExitUsage;
    std::string b = budget_json(o, /*overrides_only=*/false);
    if (cmd == "check") {
      rc = csys_run_check(inst, b.c_str(), fmt, &out, &err);
    } else if (cmd == "close") {
      std::string seed = "{}";
      if (!o.seed_path.empty() && !read_file(o.seed_path, seed)) {
        std::cerr << "error: cannot read " << o.seed_path << "\n";
        csys_instance_destroy(inst);
        return kExitUsage;
      }
      rc = csys_run_close(inst, b.c_str(), seed.c_str(), fmt, &out, &err);
    } else if (cmd == "quotient") {
      std::string rel = "{}";
      if (!o.relation_path.empty() && !read_file(o.relation_path, rel)) {
        std::cerr << "error: cannot read " << o.relation_path << "\n";
        csys_instance_destroy(inst);
        return kExitUsage;
      }
      rc = csys_run_quotient(inst, b.c_str(), rel.c_str(), fmt, &out, &err);
    }
    csys_instance_destroy(inst);
  }

  if (err) {
    std::cerr << "error: " << err << "\n";
    csys_free(err);
  }
  int emit_rc = emit(o, out);
  csys_free(out);
  if (emit_rc != kExitOk) return emit_rc;
  return map_status(rc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for finitely enumerated contextual structures"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--instance", o.instance_path, "instance config JSON path");
    sub->add_option("--max-len", o.max_len, "maximum object length")
        ->each([&](const std::string&) { o.max_len_set = true; });
    sub->add_option("--point-cap", o.point_cap, "cap on enumerated point sets")
        ->each([&](const std::string&) { o.point_cap_set = true; });
    sub->add_option("--hom-cap", o.hom_cap, "cap on enumerated hom sets")
        ->each([&](const std::string&) { o.hom_cap_set = true; });
    sub->add_option("--rng-seed", o.rng_seed, "seed for deterministic sampling")
        ->each([&](const std::string&) { o.rng_seed_set = true; });
    sub->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--out", o.out_path, "write the report to this path");
  };

  CLI::App* c_check = app.add_subcommand("check", "structural axiom and pullback suites");
  add_common(c_check);
  CLI::App* c_close = app.add_subcommand("close", "subsystem closure, dump and lemma suite");
  add_common(c_close);
  c_close->add_option("--seed", o.seed_path, "subsystem seed JSON path");
  CLI::App* c_quot = app.add_subcommand("quotient", "congruence suite and quotient dump");
  add_common(c_quot);
  c_quot->add_option("--relation", o.relation_path, "relation seed JSON path");
  CLI::App* c_all = app.add_subcommand("suite-all", "every suite of every shipped fixture");
  add_common(c_all);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  for (CLI::App* sub : {c_check, c_close, c_quot, c_all})
    if (sub->parsed()) return run_command(sub->get_name(), o);
  return kExitUsage;
}
