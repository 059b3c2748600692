// peakon-lab: runs experiment configs through the C interface.
//
//   peakon-lab run <config> [--out DIR] [--dt X] [--t-end X]
//   peakon-lab identities [--seed N] [--out DIR]
//
// Exit status: 0 all audits passed, 1 an audit (or the run itself) failed,
// 2 usage or configuration error.

#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "peakon/peakon.h"

namespace {

constexpr int kPass = 0;
constexpr int kAuditFailure = 1;
constexpr int kUsage = 2;

bool is_config_error(peakon_status s) {
  switch (s) {
    case PEAKON_ERR_NULL_ARGUMENT:
    case PEAKON_ERR_INVALID_ARGUMENT:
    case PEAKON_ERR_PARSE:
    case PEAKON_ERR_VALIDATION:
    case PEAKON_ERR_IO:
    case PEAKON_ERR_INVALID_GRID:
    case PEAKON_ERR_BOUNDARY_DECAY:
    case PEAKON_ERR_CONTINUITY:
      return true;
    default:
      return false;
  }
}

int report_error(peakon_status s) {
  std::fprintf(stderr, "peakon-lab: %s: %s\n", peakon_status_string(s), peakon_last_error());
  return is_config_error(s) ? kUsage : kAuditFailure;
}

struct ConfigHandle {
  peakon_config* p = nullptr;
  ~ConfigHandle() { peakon_config_free(p); }
};

struct RunHandle {
  peakon_run* p = nullptr;
  ~RunHandle() { peakon_run_free(p); }
};

int execute(peakon_config* cfg) {
  RunHandle run;
  if (auto s = peakon_run_experiment(cfg, &run.p); s != PEAKON_OK) return report_error(s);
  const size_t n = peakon_run_audit_count(run.p);
  for (size_t i = 0; i < n; ++i) {
    const char *name = nullptr, *detail = nullptr;
    peakon_audit_status st{};
    peakon_run_audit(run.p, i, &name, &st, &detail);
    const char* word = st == PEAKON_AUDIT_PASS ? "pass" : st == PEAKON_AUDIT_FAIL ? "FAIL" : "skipped";
    std::printf("%-24s %-7s %s\n", name, word, detail);
  }
  if (peakon_run_passed(run.p)) {
    std::printf("result: pass\n");
    return kPass;
  }
  std::printf("result: fail (%s)\n", peakon_run_first_failure(run.p));
  return kAuditFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Peakon perturbation lab for the Novikov equation"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the scenario described by a config file");
  std::string config_path, out_dir, dt, t_end;
  run->add_option("config", config_path, "Path to a key = value config file")->required();
  run->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  run->add_option("--dt", dt, "Time step (overrides dt)");
  run->add_option("--t-end", t_end, "Final time (overrides t_end)");

  auto* ident = app.add_subcommand("identities", "Run the convolution identity suite");
  std::string seed = "1";
  ident->add_option("--seed", seed, "Seed of the first random datum");
  ident->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  ConfigHandle cfg;
  auto set = [&](const char* key, const std::string& value) {
    return value.empty() ? PEAKON_OK : peakon_config_set(cfg.p, key, value.c_str());
  };
  peakon_status s = PEAKON_OK;
  if (*run) {
    s = peakon_config_load(config_path.c_str(), &cfg.p);
    if (s == PEAKON_OK) s = set("output_dir", out_dir);
    if (s == PEAKON_OK) s = set("dt", dt);
    if (s == PEAKON_OK) s = set("t_end", t_end);
  } else {
    s = peakon_config_new(&cfg.p);
    if (s == PEAKON_OK) s = set("seed", seed);
    if (s == PEAKON_OK) s = set("output_dir", out_dir.empty() ? "out/identities" : out_dir);
  }
  if (s != PEAKON_OK) return report_error(s);
  return execute(cfg.p);
}
