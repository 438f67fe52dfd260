#include "raas/harness.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <cmath>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace raas {

namespace {

struct Job {
  std::size_t method;
  std::size_t seed;
};

void run_jobs(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const int workers = std::max(1, std::min<int>(jobs, int(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

AggregateSeries aggregate(const std::vector<const RunTrace*>& traces) {
  AggregateSeries out;
  if (traces.empty()) return out;
  std::size_t len = traces.front()->records.size();
  for (const RunTrace* t : traces) len = std::min(len, t->records.size());
  const double n = double(traces.size());
  out.mean.resize(len);
  out.stdev.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    double s = 0;
    for (const RunTrace* t : traces) s += t->records[i].gap;
    const double m = s / n;
    double v = 0;
    for (const RunTrace* t : traces) {
      const double d = t->records[i].gap - m;
      v += d * d;
    }
    out.mean[i] = m;
    out.stdev[i] = std::sqrt(v / n);
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, int jobs,
                                ProblemPtr problem) {
  ExperimentResult res;
  res.problem = problem ? problem : build_problem(cfg.problem);
  res.noise = cfg.noise;
  res.seeds = cfg.seeds;
  res.canonical = cfg.canonical;
  const Problem& pr = *res.problem;

  for (const MethodConfig& m : cfg.methods) {
    MethodResult mr;
    mr.config = m;
    mr.traces.resize(cfg.seeds.size());
    mr.failures.resize(cfg.seeds.size());
    if (is_adaptive(m.tag)) {
      try {
        mr.params = resolve_raas(m, pr);
      } catch (const std::exception& e) {
        for (auto& f : mr.failures) f = e.what();
      }
    }
    res.methods.push_back(std::move(mr));
  }

  std::vector<Job> work;
  for (std::size_t mi = 0; mi < res.methods.size(); ++mi)
    for (std::size_t si = 0; si < cfg.seeds.size(); ++si)
      if (res.methods[mi].failures[si].empty()) work.push_back({mi, si});

  const long tape_len = 5 * cfg.T;
  run_jobs(work.size(), jobs, [&](std::size_t i) {
    const Job& j = work[i];
    MethodResult& mr = res.methods[j.method];
    try {
      NoiseTape tape(cfg.seeds[j.seed], pr.d, cfg.noise, tape_len);
      Oracle oracle(res.problem, &tape);
      if (mr.params) {
        mr.traces[j.seed] = run(oracle, *mr.params, cfg.T, cfg.stop);
      } else {
        mr.traces[j.seed] =
            run_baseline(oracle, resolve_baseline(mr.config, pr), cfg.T, cfg.stop);
      }
    } catch (const InvariantError& e) {
      mr.failures[j.seed] = std::string(e.what()) + " at trial " + std::to_string(e.trial);
    } catch (const std::exception& e) {
      mr.failures[j.seed] = e.what();
    }
  });

  for (MethodResult& mr : res.methods) {
    std::vector<const RunTrace*> ok;
    for (const auto& t : mr.traces)
      if (t) ok.push_back(&*t);
    mr.series = aggregate(ok);
  }
  return res;
}

namespace {

std::string grid_label(const NoiseConfig& n) {
  std::ostringstream ss;
  ss << "sg" << format_double(n.sigma_g) << "_sf" << format_double(n.sigma_f) << "_br"
     << format_double(n.bias_rel);
  return ss.str();
}

}  // namespace

std::vector<std::string> sweep(const ExperimentConfig& cfg, const std::string& out_dir,
                               const EmitOptions& opt, int jobs) {
  auto sg = cfg.grid.sigma_g.empty() ? std::vector<double>{cfg.noise.sigma_g} : cfg.grid.sigma_g;
  auto sf = cfg.grid.sigma_f.empty() ? std::vector<double>{cfg.noise.sigma_f} : cfg.grid.sigma_f;
  auto br = cfg.grid.bias_rel.empty() ? std::vector<double>{cfg.noise.bias_rel} : cfg.grid.bias_rel;
  ProblemPtr problem = build_problem(cfg.problem);
  std::vector<std::string> files;
  for (double a : sg)
    for (double b : br)
      for (double c : sf) {
        ExperimentConfig point = cfg;
        point.noise.sigma_g = a;
        point.noise.bias_rel = b;
        point.noise.sigma_f = c;
        validate(point.noise);
        const std::string label = grid_label(point.noise);
        point.canonical = cfg.canonical + "|" + label;
        ExperimentResult res = run_experiment(point, jobs, problem);
        for (const std::string& f : emit(res, out_dir + "/" + label, opt))
          files.push_back(label + "/" + f);
      }
  return files;
}

VerifyReport verify(const ExperimentConfig& cfg, int jobs) {
  VerifyReport rep;
  ExperimentResult res = run_experiment(cfg, jobs);
  const Problem& pr = *res.problem;
  auto line = [&](const std::string& who, const std::string& what, long bad,
                  const std::string& extra = "") {
    std::string s = (bad == 0 ? "ok   " : "FAIL ") + who + " " + what;
    if (!extra.empty()) s += " (" + extra + ")";
    rep.lines.push_back(s);
    rep.violations += bad;
  };

  for (const MethodResult& mr : res.methods) {
    for (std::size_t si = 0; si < res.seeds.size(); ++si) {
      const std::string who = mr.config.name + " seed " + std::to_string(res.seeds[si]);
      if (!mr.failures[si].empty()) {
        line(who, "run", 1, mr.failures[si]);
        continue;
      }
      if (!mr.params) continue;
      const RaasParams& p = *mr.params;
      const RunTrace& tr = *mr.traces[si];

      long alpha_bad = 0, ratio_bad = 0, phi_bad = 0, null_bad = 0;
      double b_hat = 0;
      for (const TrialRecord& r : tr.records) {
        const double mu = p.no_momentum ? 0.0 : p.mu;
        const double vt = p.no_momentum ? 0.0 : r.vartheta;
        const double C = 2 * r.theta * (1 - vt) * (1 - vt) * mu;
        const double base = r.alpha_prev * r.alpha_prev / r.gamma_prev;
        const double res_a = r.alpha_hat * r.alpha_hat / r.gamma_hat -
                             (1 - r.alpha_hat) * base - C * r.alpha_hat;
        if (std::abs(res_a) > 1e-12 * std::max(1.0, base)) ++alpha_bad;
        if (r.accepted && r.gamma / r.gamma_prev > 1 / p.nu + 1e-12) ++ratio_bad;
        if (!std::isnan(r.Phi)) {
          if (r.Phi < r.gap_x) ++phi_bad;
          if (!r.accepted && r.Phi_next != r.Phi) ++null_bad;
          b_hat = std::max({b_hat, r.dist_z, r.y_z});
        }
      }
      line(who, "alpha-root residual", alpha_bad);
      line(who, "accepted step ratio <= 1/nu", ratio_bad);
      line(who, "Lyapunov dominates gap", phi_bad);
      line(who, "null step keeps Lyapunov", null_bad);

      EnvelopeReport env = lambda_envelopes(tr, p);
      line(who, "monotone gamma*lambda/alpha^2", env.part_a);
      if (p.mu == 0 || p.no_momentum)
        line(who, "two-sided lambda sandwich", env.part_b);
      else
        line(who, "exponential lambda envelope", env.part_c);
      line(who, "alpha <= alpha_bar", env.part_d);

      QuasiDescentReport qd = quasi_descent_check(tr, p.mu);
      line(who, "quasi-descent", qd.violations,
           std::to_string(qd.terms.size()) + " checked, " + std::to_string(qd.skipped) +
               " skipped");
      TruncationCheck tc = truncation_extrapolation_check(tr);
      line(who, "truncated-branch extrapolation bound", tc.violations,
           std::to_string(tc.checked) + " checked");

      auto gb = gamma_bar(pr.L, p.theta, p.vartheta, p.gamma_max);
      const bool assumption_regime = p.tol_mode == ToleranceMode::Theory && p.mu > 0 &&
                                     p.vartheta > 0 && cfg.stop.has_value() &&
                                     !p.sw.enabled && !p.no_momentum && p.check2 &&
                                     cfg.stop->eps_phi >= p.eps_g * p.eps_g /
                                                              (2 * p.mu * p.vartheta * p.vartheta);
      long limit = tr.t_eps ? *tr.t_eps : tr.records.back().t + 1;
      IndicatorReport ind = indicators(tr, p.eps_g, p.eps_f, gb, limit);
      std::ostringstream info;
      info << "p_hat=" << format_double(ind.p_hat) << ", " << ind.violations << " of "
           << ind.considered << " trials with small step and reliable oracle rejected";
      if (assumption_regime)
        line(who, "small reliable steps accepted", ind.violations, info.str());
      else
        rep.lines.push_back("info " + who + " indicators (" + info.str() + ")");
      if (b_hat > 0)
        rep.lines.push_back("info " + who + " empirical trajectory bound B_hat=" +
                            format_double(b_hat));
    }
  }
  return rep;
}

TheoryConstants constants_for(const ExperimentConfig& cfg, const MethodConfig& m,
                              const Problem& p) {
  TheoryInputs in;
  in.params = resolve_raas(m, p);
  in.L = p.L;
  in.moments = cfg.theory.moments;
  in.S_f = cfg.theory.S_f;
  in.S_g = cfg.theory.S_g;
  in.p_hat = cfg.theory.p_hat;
  in.B = cfg.theory.B;
  return theory_constants(in);
}

std::string constants_json(const ExperimentConfig& cfg) {
  using nlohmann::ordered_json;
  ProblemPtr p = build_problem(cfg.problem);
  ordered_json out;
  out["problem"] = {{"L", p->L}, {"mu", p->mu}, {"d", p->d}};
  auto num = [](double v) -> ordered_json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  ordered_json methods = ordered_json::array();
  for (const MethodConfig& m : cfg.methods) {
    if (!is_adaptive(m.tag) || m.tag == "sass") continue;
    ordered_json e;
    e["method"] = m.name;
    try {
      RaasParams rp = resolve_raas(m, *p);
      e["params"] = {{"mu", rp.mu},       {"theta", rp.theta},   {"vartheta", rp.vartheta},
                     {"nu", rp.nu},       {"gamma0", rp.gamma0}, {"gamma_max", rp.gamma_max},
                     {"alpha0", rp.alpha0}, {"eps_f", rp.eps_f}, {"eps_g", rp.eps_g}};
      TheoryConstants c = constants_for(cfg, m, *p);
      e["constants"] = {{"gamma_bar", num(c.gamma_bar)}, {"D", num(c.D)},
                        {"alpha_bar", num(c.alpha_bar)}, {"rho", num(c.rho)},
                        {"C0", num(c.C0)},               {"C_lambda", num(c.C_lambda)},
                        {"C_kappa", num(c.C_kappa)},     {"C3", num(c.C3)},
                        {"C4", num(c.C4)},               {"C5", num(c.C5)},
                        {"C3_prime", num(c.C3p)},        {"eps_phi_floor", num(c.eps_phi)},
                        {"eps_grad_floor", num(c.eps_grad)}, {"eps0", num(c.eps0)},
                        {"p", num(c.p)}};
      e["warnings"] = c.warnings;
    } catch (const std::exception& ex) {
      e["error"] = ex.what();
    }
    methods.push_back(e);
  }
  out["methods"] = methods;
  return out.dump(2);
}

}  // namespace raas
