#include "raas/raas_c.h"

#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "raas/harness.hpp"

struct raas_experiment {
  raas::ExperimentConfig cfg;
};

namespace {

thread_local std::string g_last_error;

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <class F>
raas_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const raas::ConfigError& e) {
    g_last_error = e.what();
    return RAAS_ERR_CONFIG;
  } catch (const raas::IoError& e) {
    g_last_error = e.what();
    return RAAS_ERR_IO;
  } catch (const raas::NumericError& e) {
    g_last_error = e.what();
    return RAAS_ERR_NUMERIC;
  } catch (const raas::InvariantError& e) {
    g_last_error = e.what();
    return RAAS_ERR_INVARIANT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RAAS_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return RAAS_ERR_INTERNAL;
  }
}

raas_status bad_arg(const char* what) {
  g_last_error = what;
  return RAAS_ERR_ARGUMENT;
}

int pick_jobs(const raas_experiment* e, int jobs) { return jobs > 0 ? jobs : e->cfg.jobs; }

std::string run_summary(const raas::ExperimentResult& res, const std::vector<std::string>& files) {
  std::ostringstream s;
  for (const auto& m : res.methods) {
    s << m.config.name << ":";
    std::size_t ok = 0;
    double secs = 0;
    for (std::size_t i = 0; i < m.traces.size(); ++i)
      if (m.traces[i]) {
        ++ok;
        secs += m.traces[i]->seconds;
      }
    s << " runs=" << ok << "/" << m.traces.size();
    if (!m.series.mean.empty())
      s << " final_mean_gap=" << raas::format_double(m.series.mean.back())
        << " final_std_gap=" << raas::format_double(m.series.stdev.back());
    s << " seconds=" << secs << "\n";
  }
  s << files.size() << " files written\n";
  return s.str();
}

}  // namespace

extern "C" {

const char* raas_last_error(void) { return g_last_error.c_str(); }

const char* raas_version(void) { return "1.0.0"; }

void raas_string_free(char* s) { std::free(s); }

raas_status raas_experiment_load(const char* path, raas_experiment** out) {
  if (!path || !out) return bad_arg("null argument");
  *out = nullptr;
  return guarded([&] {
    auto* e = new raas_experiment{raas::load_config(path)};
    *out = e;
    return RAAS_OK;
  });
}

raas_status raas_experiment_parse(const char* json_text, raas_experiment** out) {
  if (!json_text || !out) return bad_arg("null argument");
  *out = nullptr;
  return guarded([&] {
    auto* e = new raas_experiment{raas::parse_config(json_text)};
    *out = e;
    return RAAS_OK;
  });
}

void raas_experiment_free(raas_experiment* e) { delete e; }

raas_status raas_experiment_run(raas_experiment* e, const char* out_dir,
                                const char* formats, int jobs, char** summary) {
  if (!e) return bad_arg("null experiment handle");
  return guarded([&] {
    auto opt = raas::parse_formats(formats ? formats : "csv");
    auto res = raas::run_experiment(e->cfg, pick_jobs(e, jobs));
    auto files = raas::emit(res, out_dir ? out_dir : e->cfg.out_dir, opt);
    if (summary) *summary = dup(run_summary(res, files));
    return RAAS_OK;
  });
}

raas_status raas_experiment_sweep(raas_experiment* e, const char* out_dir,
                                  const char* formats, int jobs, char** summary) {
  if (!e) return bad_arg("null experiment handle");
  return guarded([&] {
    auto opt = raas::parse_formats(formats ? formats : "csv");
    auto files = raas::sweep(e->cfg, out_dir ? out_dir : e->cfg.out_dir, opt,
                             pick_jobs(e, jobs));
    if (summary) {
      std::string s;
      for (const auto& f : files) s += f + "\n";
      *summary = dup(s);
    }
    return RAAS_OK;
  });
}

raas_status raas_experiment_verify(raas_experiment* e, int jobs, char** report) {
  if (!e) return bad_arg("null experiment handle");
  return guarded([&] {
    raas::VerifyReport rep = raas::verify(e->cfg, pick_jobs(e, jobs));
    if (report) {
      std::string s;
      for (const auto& l : rep.lines) s += l + "\n";
      s += std::to_string(rep.violations) + " violation(s)\n";
      *report = dup(s);
    }
    if (rep.violations > 0) {
      g_last_error = std::to_string(rep.violations) + " invariant violation(s)";
      return RAAS_ERR_VERIFY;
    }
    return RAAS_OK;
  });
}

raas_status raas_experiment_constants(raas_experiment* e, char** json_out) {
  if (!e || !json_out) return bad_arg("null argument");
  return guarded([&] {
    *json_out = dup(raas::constants_json(e->cfg));
    return RAAS_OK;
  });
}

raas_status raas_solve_alpha(double gamma_hat, double gamma_prev, double alpha_prev,
                             double theta, double vartheta, double mu,
                             double* alpha_out) {
  if (!alpha_out) return bad_arg("null output pointer");
  return guarded([&] {
    *alpha_out = raas::solve_alpha(gamma_hat, gamma_prev, alpha_prev, theta, vartheta, mu);
    return RAAS_OK;
  });
}

double raas_auxiliary_step(double gamma, double alpha, double theta, double vartheta) {
  return raas::auxiliary_step(gamma, alpha, theta, vartheta);
}

}  // extern "C"
