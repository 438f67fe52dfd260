#include "raas/raas.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "raas/diagnostics.hpp"

namespace raas {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double default_gamma_max(double mu, double vartheta, double gamma0) {
  if (mu > 0 && vartheta < 1)
    return 1.0 / (2.0 * (1 - vartheta) * (1 - vartheta) * mu);
  return 100.0 * gamma0;
}

std::pair<double, double> alpha0_interval(const RaasParams& p) {
  double lo = (1 - p.vartheta) * std::sqrt(2 * p.theta * p.mu * p.gamma0);
  double hi = std::sqrt(p.gamma0 / p.gamma_max);
  return {lo, std::min(hi, 1.0)};
}

RaasParams finalize(RaasParams p) {
  std::string err;
  auto need = [&](bool ok, const char* msg) {
    if (!ok) err += std::string(err.empty() ? "" : "; ") + msg;
  };
  need(p.mu >= 0, "mu must be >= 0");
  need(p.nu > 0 && p.nu < 1, "nu must lie in (0,1)");
  need(p.theta > 0 && p.theta < 1, "theta must lie in (0,1)");
  need(p.vartheta >= 0 && (p.vartheta < 1 || (p.no_momentum && p.vartheta <= 1)),
       "vartheta must lie in [0,1)");
  need(p.gamma0 > 0, "gamma0 must be > 0");
  need(p.eps_f > 0, "eps_f must be > 0");
  need(p.eps_g > 0, "eps_g must be > 0");
  if (p.sw.enabled) {
    need(p.sw.n_vartheta >= 1 && p.sw.n_theta >= 1, "switch thresholds must be >= 1");
    need(p.sw.vartheta_safe >= 0 && p.sw.vartheta_safe < 1, "vartheta_safe must lie in [0,1)");
    need(p.sw.theta_safe > 0 && p.sw.theta_safe < 1, "theta_safe must lie in (0,1)");
  }
  if (!err.empty()) throw ConfigError(err);

  if (!(p.gamma_max > 0)) p.gamma_max = default_gamma_max(p.mu, p.vartheta, p.gamma0);
  if (p.mu > 0 && p.vartheta < 1) {
    double cap = 1.0 / (2 * (1 - p.vartheta) * (1 - p.vartheta) * p.mu);
    need(p.gamma_max <= cap * (1 + 1e-15),
         "gamma_max exceeds 1/(2(1-vartheta)^2 mu)");
  }
  need(p.nu * p.gamma0 <= p.gamma_max, "first trial step nu*gamma0 exceeds gamma_max");

  auto [lo, hi] = alpha0_interval(p);
  need(lo < hi, "alpha0 interval is empty");
  if (!err.empty()) throw ConfigError(err);
  if (!(p.alpha0 > 0)) {
    p.alpha0 = 0.5 * (lo + hi);
  } else {
    need(p.alpha0 > lo && p.alpha0 < hi, "alpha0 outside its admissible interval");
  }
  if (!err.empty()) throw ConfigError(err);
  return p;
}

double alpha_root(double b, double c) {
  const double s = b - c;
  const double r = std::sqrt(s * s + 4 * b);
  double a = s >= 0 ? 2 * b / (s + r) : 0.5 * (r - s);
  // One Newton step on a^2 + s a - b.
  const double q = a * a + s * a - b;
  const double dq = 2 * a + s;
  if (dq > 0) a -= q / dq;
  return a;
}

double solve_alpha(double gamma_hat, double gamma_prev, double alpha_prev,
                   double theta, double vartheta, double mu) {
  const double b = gamma_hat / gamma_prev * alpha_prev * alpha_prev;
  const double c = 2 * theta * (1 - vartheta) * (1 - vartheta) * mu * gamma_hat;
  const double a = alpha_root(b, c);
  if (!(a > 0 && a < 1))
    throw InvariantError("alpha root " + std::to_string(a) + " outside (0,1)");
  return a;
}

Momentum momentum_coefficients(double alpha_hat, double alpha_prev,
                               double gamma_hat, double theta, double vartheta,
                               double mu) {
  Momentum m;
  m.beta = 2 * (1 - vartheta) * (1 - vartheta) * theta * mu * gamma_hat / alpha_hat;
  if (!(m.beta >= 0 && m.beta < 1))
    throw InvariantError("momentum beta " + std::to_string(m.beta) + " outside [0,1)");
  const double ob = 1 - m.beta;
  m.rho = alpha_hat * (1 - alpha_prev) * ob /
          (alpha_prev * (1 - alpha_hat + alpha_hat * ob / (1 - vartheta)));
  return m;
}

double truncation_threshold(double theta) { return (1 - theta) / (2 - theta); }

double auxiliary_step(double gamma, double alpha, double theta, double vartheta) {
  const double untruncated = 2 * theta - alpha / (1 - vartheta);
  const double truncated = 2 * theta + (theta - 2) * alpha;
  return gamma / (1 - alpha) * std::max(untruncated, truncated);
}

Tolerances tolerances(ToleranceMode mode, double mu, double eps_f_prime,
                      double eps_g_prime, double alpha_hat, double step_norm) {
  Tolerances t;
  if (mode == ToleranceMode::Constant) {
    t.eps_f = eps_f_prime;
    t.eps_g = eps_f_prime;
    t.scaling = 1.0;
  } else if (mu > 0) {
    t.eps_f = eps_f_prime;
    t.eps_g = eps_g_prime * eps_g_prime / (2 * mu);
    t.scaling = 1.0;
  } else {
    t.eps_f = eps_f_prime * alpha_hat;
    t.eps_g = eps_g_prime * step_norm;
    t.scaling = alpha_hat;
  }
  return t;
}

bool check_acceptance(double f_x, double f_y, double f_xp, const Vec& G,
                      const Vec& y, const Vec& x, double gamma_hat,
                      double theta, double eps_f, double eps_g, bool check2) {
  const bool c1 = f_xp <= f_y - gamma_hat * theta * G.squaredNorm() + eps_f;
  if (!c1) return false;
  if (!check2) return true;
  return f_y <= f_x + G.dot(y - x) + eps_g + eps_f;
}

double step_size_update(double gamma_hat, bool accepted, double nu,
                        double gamma_max) {
  return accepted ? std::min(gamma_hat / nu, gamma_max) : nu * gamma_hat;
}

RaasState initial_state(const RaasParams& p, const Vec& x1) {
  RaasState s;
  s.t = 1;
  s.x = x1;
  s.x_prev = x1;
  s.xbar = x1;
  s.gamma_prev = p.gamma0;
  s.gamma_hat = p.nu * p.gamma0;
  s.alpha_prev = p.alpha0;
  s.theta = p.theta;
  s.vartheta = p.vartheta;
  s.check2 = p.check2;
  return s;
}

void switch_update(RaasState& s, const SwitchConfig& sw) {
  if (!sw.enabled) return;
  if (s.gamma_hat > s.gamma_rec) {
    s.gamma_rec = s.gamma_hat;
    s.k_stag = 0;
    return;
  }
  ++s.k_stag;
  if (!s.s_vartheta && s.k_stag >= sw.n_vartheta) {
    s.s_vartheta = true;
    s.vartheta = sw.vartheta_safe;
  }
  if (sw.switch_theta && !s.s_theta && s.k_stag >= sw.n_theta) {
    s.s_theta = true;
    s.theta = sw.theta_safe;
    if (sw.disable_check2_on_theta_switch) s.check2 = false;
  }
}

namespace {

double lyapunov_of(const Problem& pr, const Vec& x, const Vec& x_prev,
                   const Vec& xbar, double gap_x, double alpha_prev,
                   double gamma_prev, double theta, double vartheta) {
  if (!(vartheta < 1)) return kNaN;
  Vec z = z_state(x, x_prev, xbar, alpha_prev, vartheta);
  return lyapunov(gap_x, (z - pr.x_star).squaredNorm(), alpha_prev, gamma_prev,
                  theta, vartheta);
}

}  // namespace

TrialRecord trial(RaasState& s, const Oracle& oracle, const RaasParams& p) {
  const Problem& pr = oracle.problem();
  switch_update(s, p.sw);

  TrialRecord r;
  r.t = s.t;
  r.gamma_hat = s.gamma_hat;
  r.alpha_prev = s.alpha_prev;
  r.gamma_prev = s.gamma_prev;
  r.theta = s.theta;
  r.vartheta = s.vartheta;
  r.check2 = s.check2;

  // Without momentum alpha is only logged; the mu = 0 recursion keeps it in (0,1).
  const double a_hat =
      p.no_momentum
          ? solve_alpha(s.gamma_hat, s.gamma_prev, s.alpha_prev, s.theta, 0.0, 0.0)
          : solve_alpha(s.gamma_hat, s.gamma_prev, s.alpha_prev, s.theta,
                        s.vartheta, p.mu);
  r.alpha_hat = a_hat;

  Vec y;
  if (p.no_momentum) {
    r.rho_hat = 0;
    r.beta_hat = 0;
    y = s.x;
  } else {
    Momentum m = momentum_coefficients(a_hat, s.alpha_prev, s.gamma_hat, s.theta,
                                       s.vartheta, p.mu);
    r.rho_hat = m.rho;
    r.beta_hat = m.beta;
    y = s.x + m.rho * (s.xbar - s.x_prev);
  }
  r.step_norm = (y - s.x).norm();

  const long tape_index = s.t - 1;
  SfoResult g = oracle.sfo(y, tape_index);
  r.W = g.W;
  r.g_norm = g.G.norm();
  Vec xp = y - s.gamma_hat * g.G;
  SzoResult f = oracle.szo(s.x, y, xp, tape_index);
  r.e_x = f.E[0];
  r.e_y = f.E[1];
  r.e_xp = f.E[2];
  r.D = f.D;

  Tolerances tol = tolerances(p.tol_mode, p.mu, p.eps_f, p.eps_g, a_hat, r.step_norm);
  r.eps_f = tol.eps_f;
  r.eps_g = tol.eps_g;
  r.scaling = tol.scaling;

  r.accepted = check_acceptance(f.f[0], f.f[1], f.f[2], g.G, y, s.x, s.gamma_hat,
                                s.theta, tol.eps_f, tol.eps_g, s.check2);

  // Read-only exact diagnostics.
  r.gap_x = pr.gap(s.x);
  r.gap_y = pr.gap(y);
  r.gap_xp = pr.gap(xp);
  r.grad_norm_y = g.grad.norm();
  Vec ys = y - pr.x_star;
  r.dist_y_sq = ys.squaredNorm();
  r.inner_err = ys.dot(g.grad - g.G);
  if (s.vartheta < 1) {
    Vec z = z_state(s.x, s.x_prev, s.xbar, s.alpha_prev, s.vartheta);
    r.dist_z = (z - pr.x_star).norm();
    r.y_z = (y - z).norm();
  } else {
    r.dist_z = r.y_z = kNaN;
  }
  r.Phi = lyapunov_of(pr, s.x, s.x_prev, s.xbar, r.gap_x, s.alpha_prev,
                      s.gamma_prev, s.theta, s.vartheta);

  if (r.accepted) {
    double gp = p.no_momentum ? s.gamma_hat
                              : auxiliary_step(s.gamma_hat, a_hat, s.theta, s.vartheta);
    r.gamma_aux = gp;
    Vec xbar_next = p.no_momentum ? xp : Vec(y - gp * g.G);
    s.x_prev = std::move(s.x);
    s.x = std::move(xp);
    s.xbar = std::move(xbar_next);
    s.gamma_prev = s.gamma_hat;
    s.alpha_prev = a_hat;
    r.gap = r.gap_xp;
  } else {
    r.gamma_aux = kNaN;
    r.gap = r.gap_x;
  }
  r.gamma = s.gamma_prev;
  r.alpha = s.alpha_prev;
  r.Phi_next = lyapunov_of(pr, s.x, s.x_prev, s.xbar, r.gap, s.alpha_prev,
                           s.gamma_prev, s.theta, s.vartheta);

  s.gamma_hat = step_size_update(s.gamma_hat, r.accepted, p.nu, p.gamma_max);
  ++s.t;
  return r;
}

RunTrace run(const Oracle& oracle, const RaasParams& p, long T,
             std::optional<StopRule> stop) {
  if (T < 1) throw ConfigError("horizon T must be >= 1");
  auto t0 = std::chrono::steady_clock::now();
  RunTrace out;
  out.records.reserve(std::size_t(T));
  RaasState s = initial_state(p, oracle.problem().x0);
  for (long k = 0; k < T; ++k) {
    TrialRecord r;
    try {
      r = trial(s, oracle, p);
    } catch (const InvariantError& e) {
      throw InvariantError(e.what(), s.t);
    }
    out.records.push_back(r);
    if (stop && stop_hit(r, stop->eps_phi, stop->eps_grad)) {
      out.t_eps = r.t;
      break;
    }
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace raas
