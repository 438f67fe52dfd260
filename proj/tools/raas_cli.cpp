// Command-line front end over the C API.
#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "raas/raas_c.h"

namespace {

int exit_code(raas_status s) {
  switch (s) {
    case RAAS_OK: return 0;
    case RAAS_ERR_VERIFY: return 1;
    case RAAS_ERR_CONFIG:
    case RAAS_ERR_ARGUMENT: return 2;
    case RAAS_ERR_IO: return 3;
    default: return 4;
  }
}

// Flag wins over environment; environment wins over config (signalled by empty / 0).
std::string pick_out(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* e = std::getenv("RAAS_OUT_DIR"); e && *e) return e;
  return {};
}

int pick_jobs(int flag) {
  if (flag > 0) return flag;
  if (const char* e = std::getenv("RAAS_JOBS"); e && *e) {
    char* end = nullptr;
    long v = std::strtol(e, &end, 10);
    if (*end == '\0' && v > 0) return int(v);
    std::fprintf(stderr, "warning: ignoring invalid RAAS_JOBS='%s'\n", e);
  }
  return 0;
}

void print_and_free(char* s, std::FILE* to) {
  if (!s) return;
  std::fputs(s, to);
  raas_string_free(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive accelerated stochastic search experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", raas_version());

  std::string config, out, formats = "csv";
  int jobs = 0;

  auto* run = app.add_subcommand("run", "run every method over every seed and write outputs");
  auto* verify = app.add_subcommand("verify", "run and check invariants; nonzero exit on violation");
  auto* sweep = app.add_subcommand("sweep", "run the noise grid, one output directory per point");
  auto* consts = app.add_subcommand("constants", "print derived theory constants as JSON");

  for (auto* sc : {run, verify, sweep, consts})
    sc->add_option("--config", config, "JSON config file")->required()->check(CLI::ExistingFile);
  for (auto* sc : {run, sweep}) {
    sc->add_option("--out", out, "output directory (env RAAS_OUT_DIR)");
    sc->add_option("--formats", formats, "comma list of csv,svg");
  }
  for (auto* sc : {run, verify, sweep})
    sc->add_option("--jobs", jobs, "worker threads (env RAAS_JOBS)")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  raas_experiment* e = nullptr;
  raas_status s = raas_experiment_load(config.c_str(), &e);
  if (s != RAAS_OK) {
    std::fprintf(stderr, "error: %s\n", raas_last_error());
    return exit_code(s);
  }

  const std::string out_dir = pick_out(out);
  const char* od = out_dir.empty() ? nullptr : out_dir.c_str();
  const int nj = pick_jobs(jobs);
  char* text = nullptr;

  if (run->parsed()) {
    s = raas_experiment_run(e, od, formats.c_str(), nj, &text);
    print_and_free(text, stdout);
  } else if (sweep->parsed()) {
    s = raas_experiment_sweep(e, od, formats.c_str(), nj, &text);
    print_and_free(text, stdout);
  } else if (verify->parsed()) {
    s = raas_experiment_verify(e, nj, &text);
    print_and_free(text, stdout);
  } else {
    s = raas_experiment_constants(e, &text);
    print_and_free(text, stdout);
    if (s == RAAS_OK) std::fputc('\n', stdout);
  }
  if (s != RAAS_OK) std::fprintf(stderr, "error: %s\n", raas_last_error());
  raas_experiment_free(e);
  return exit_code(s);
}
