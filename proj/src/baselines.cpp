#include "raas/baselines.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "raas/diagnostics.hpp"

namespace raas {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

Vec sgd_step(const Vec& x, const Vec& G, double eta) { return x - eta * G; }

Vec nag_extrapolate(const Vec& x, const Vec& x_prev, double beta) {
  return x + beta * (x - x_prev);
}

Vec nag_step(const Vec& x, const Vec& x_prev, const Vec& G_at_y, double eta,
             double beta) {
  return nag_extrapolate(x, x_prev, beta) - eta * G_at_y;
}

Vec clip(const Vec& G, double tau) {
  const double n = G.norm();
  if (n <= tau) return G;
  return G * (tau / n);
}

RunTrace run_baseline(const Oracle& oracle, const BaselineParams& b, long T,
                      std::optional<StopRule> stop) {
  if (T < 1) throw ConfigError("horizon T must be >= 1");
  if (!(b.eta > 0)) throw ConfigError("baseline step size eta must be > 0");
  if (!(b.beta >= 0 && b.beta < 1)) throw ConfigError("baseline momentum beta must lie in [0,1)");
  if (b.kind == BaselineKind::AccClip && !(b.tau_clip > 0))
    throw ConfigError("clipping threshold must be > 0");

  auto t0 = std::chrono::steady_clock::now();
  const Problem& pr = oracle.problem();
  RunTrace out;
  out.records.reserve(std::size_t(T));
  Vec x = pr.x0;
  Vec x_prev = pr.x0;
  const double beta = b.kind == BaselineKind::Sgd ? 0.0 : b.beta;

  for (long t = 1; t <= T; ++t) {
    TrialRecord r;
    r.t = t;
    r.accepted = true;
    r.gamma_hat = r.gamma = b.eta;
    r.alpha_hat = r.alpha = r.alpha_prev = r.gamma_prev = kNaN;
    r.rho_hat = beta;
    r.beta_hat = kNaN;
    r.gamma_aux = kNaN;
    r.D = r.e_x = r.e_y = r.e_xp = kNaN;
    r.eps_f = r.eps_g = r.scaling = kNaN;
    r.theta = r.vartheta = kNaN;
    r.check2 = false;
    r.Phi = r.Phi_next = kNaN;
    r.dist_z = r.y_z = kNaN;

    Vec y = nag_extrapolate(x, x_prev, beta);
    SfoResult g = oracle.sfo(y, t - 1);
    r.W = g.W;
    Vec G = b.kind == BaselineKind::AccClip ? clip(g.G, b.tau_clip) : g.G;
    r.g_norm = G.norm();
    r.step_norm = (y - x).norm();
    Vec xn = y - b.eta * G;

    r.gap_x = pr.gap(x);
    r.gap_y = pr.gap(y);
    r.gap_xp = pr.gap(xn);
    r.gap = r.gap_xp;
    r.grad_norm_y = g.grad.norm();
    Vec ys = y - pr.x_star;
    r.dist_y_sq = ys.squaredNorm();
    r.inner_err = ys.dot(g.grad - g.G);

    x_prev = std::move(x);
    x = std::move(xn);
    out.records.push_back(r);
    if (stop && stop_hit(r, stop->eps_phi, stop->eps_grad)) {
      out.t_eps = t;
      break;
    }
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

RaasParams sass_params(RaasParams base) {
  base.vartheta = 1.0;
  base.no_momentum = true;
  base.check2 = false;
  base.sw.enabled = false;
  return base;
}

RaasParams adp_nag_params(RaasParams base) {
  base.theta = 0.5;
  base.vartheta = 0.0;
  base.check2 = false;
  base.sw.enabled = false;
  return base;
}

}  // namespace raas
