#include "raas/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace raas {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

Vec z_state(const Vec& x, const Vec& x_prev, const Vec& xbar, double alpha_prev,
            double vartheta) {
  return x + ((1 - alpha_prev) / alpha_prev * (1 - vartheta)) * (xbar - x_prev);
}

double lyapunov(double gap_x, double dist_z_sq, double alpha_prev,
                double gamma_prev, double theta, double vartheta) {
  const double w = alpha_prev * alpha_prev /
                   (4 * theta * (1 - vartheta) * (1 - vartheta) * gamma_prev);
  return gap_x + w * dist_z_sq;
}

double lyapunov(const Problem& p, const Vec& x, const Vec& z, double alpha_prev,
                double gamma_prev, double theta, double vartheta) {
  return lyapunov(p.gap(x), (z - p.x_star).squaredNorm(), alpha_prev, gamma_prev,
                  theta, vartheta);
}

double compensation_term(const TrialRecord& r, double mu) {
  const double v = r.vartheta;
  return v * r.alpha / (1 - v) * (r.gap_y + 0.5 * mu * r.dist_y_sq);
}

double error_term(const TrialRecord& r) {
  const double a = r.alpha;
  return a * (r.inner_err / (1 - r.vartheta) + r.eps_f + r.e_y - r.e_xp) +
         (1 - a) * (r.eps_g + 2 * r.eps_f + r.e_x - r.e_xp);
}

QuasiDescentReport quasi_descent_check(const RunTrace& trace, double mu) {
  QuasiDescentReport rep;
  for (const TrialRecord& r : trace.records) {
    if (!r.accepted) continue;
    if (!(r.vartheta < truncation_threshold(r.theta)) || !r.check2 ||
        std::isnan(r.Phi)) {
      ++rep.skipped;
      continue;
    }
    QuasiDescentTerm q;
    q.t = r.t;
    q.lhs = r.Phi_next;
    q.T_C = compensation_term(r, mu);
    q.T_E = error_term(r);
    q.rhs = (1 - r.alpha) * r.Phi - q.T_C + q.T_E;
    q.residual = q.rhs - q.lhs;
    q.tol = 1e-9 * std::max(1.0, r.Phi);
    if (q.residual < -q.tol) ++rep.violations;
    rep.worst = std::min(rep.worst, q.residual + q.tol);
    rep.terms.push_back(q);
  }
  return rep;
}

double alpha_bar(double alpha0, double nu, double theta, double mu) {
  const double c = mu > 0 ? theta : 0.0;
  const double s = 1 - c * nu;
  return std::max(alpha0, 2.0 / (std::sqrt(s * s + 4 * nu) + s));
}

EnvelopeReport lambda_envelopes(const RunTrace& trace, const RaasParams& p,
                                double rel_tol) {
  EnvelopeReport rep;
  // Momentum-free traces run the alpha recursion with mu = 0.
  const double mu = p.no_momentum ? 0.0 : p.mu;
  double theta_max = p.theta;
  for (const TrialRecord& r : trace.records) theta_max = std::max(theta_max, r.theta);
  rep.alpha_bar = alpha_bar(p.alpha0, p.nu, theta_max, mu);

  const double q0 = p.gamma0 / (p.alpha0 * p.alpha0);
  double q_prev = q0;
  double lambda = 1.0;
  double sum_sqrt = 0.0;
  double log_env = 0.0;
  const double k = p.alpha0 / std::sqrt(p.gamma0);

  auto breach = [](double excess, double scale) {
    return excess / std::max(std::abs(scale), 1e-300);
  };

  for (const TrialRecord& r : trace.records) {
    ++rep.checked;
    if (r.accepted) {
      lambda *= 1 - r.alpha;
      sum_sqrt += std::sqrt(r.gamma);
      if (mu > 0)
        log_env += std::log1p(-(1 - r.vartheta) * std::sqrt(2 * r.theta * mu * r.gamma));
    }

    // Part A.
    const double q = r.gamma * lambda / (r.alpha * r.alpha);
    if (mu == 0) {
      double rel = std::abs(q - q0) / q0;
      if (rel > rel_tol) {
        ++rep.part_a;
        rep.worst_a = std::max(rep.worst_a, rel);
      }
    } else if (q > q_prev * (1 + rel_tol)) {
      ++rep.part_a;
      rep.worst_a = std::max(rep.worst_a, breach(q - q_prev, q_prev));
    }
    q_prev = q;

    // Parts B and C.
    if (mu == 0) {
      const double lo = 1.0 / ((1 + k * sum_sqrt) * (1 + k * sum_sqrt));
      const double hi = 1.0 / ((1 + 0.5 * k * sum_sqrt) * (1 + 0.5 * k * sum_sqrt));
      if (lambda < lo * (1 - rel_tol)) {
        ++rep.part_b;
        rep.worst_b = std::max(rep.worst_b, breach(lo - lambda, lo));
      }
      if (lambda > hi * (1 + rel_tol)) {
        ++rep.part_b;
        rep.worst_b = std::max(rep.worst_b, breach(lambda - hi, hi));
      }
    } else {
      const double env = std::exp(log_env);
      if (lambda > env * (1 + rel_tol)) {
        ++rep.part_c;
        rep.worst_c = std::max(rep.worst_c, breach(lambda - env, env));
      }
    }

    // Part D.
    const double amax = std::max(r.alpha, r.alpha_hat);
    if (amax > rep.alpha_bar * (1 + 1e-12)) {
      ++rep.part_d;
      rep.worst_d = std::max(rep.worst_d, breach(amax - rep.alpha_bar, rep.alpha_bar));
    }
  }
  return rep;
}

std::optional<double> gamma_bar(double L, double theta, double vartheta,
                                double gamma_max) {
  const double num = 2 * (1 - 2 * vartheta - theta * (1 - vartheta));
  if (!(num > 0) || !(vartheta < 1)) return std::nullopt;
  return std::min(num / (L * (1 - vartheta)), gamma_max);
}

IndicatorReport indicators(const RunTrace& trace, double eps_g_prime,
                           double eps_f_prime, std::optional<double> gbar,
                           long t_limit) {
  IndicatorReport rep;
  rep.lambda_defined = gbar.has_value();
  long reliable = 0;
  for (const TrialRecord& r : trace.records) {
    const int I = (r.W <= eps_g_prime && r.D <= r.scaling * eps_f_prime) ? 1 : 0;
    const int Lam = gbar ? (r.gamma_hat >= *gbar ? 1 : 0) : -1;
    rep.I.push_back(I);
    rep.Lambda.push_back(Lam);
    reliable += I;
    if (!gbar) continue;
    if (t_limit >= 0 && r.t >= t_limit) continue;
    ++rep.considered;
    if ((1 - Lam) * I > (r.accepted ? 1 : 0)) ++rep.violations;
  }
  rep.p_hat = trace.records.empty() ? 0.0 : double(reliable) / trace.records.size();
  return rep;
}

TheoryConstants theory_constants(const TheoryInputs& in) {
  const RaasParams& p = in.params;
  TheoryConstants c;
  const double mu = p.mu;
  const double th = p.theta;
  const double vt = p.vartheta;

  if (in.moments) {
    const OracleMoments& m = *in.moments;
    double dg = mu > 0 ? p.eps_g * p.eps_g - m.eps_g * m.eps_g : p.eps_g - m.eps_g;
    double df = p.eps_f - m.eps_f;
    if (!(dg > 0) || !(df > 0))
      throw ConfigError("theory constants: relaxed tolerances must exceed intrinsic ones");
    c.p = 1 - m.upsilon_g / std::pow(dg, 1 + m.delta) -
          m.upsilon_f / std::pow(df, 1 + m.varrho);
    if (!(c.p > 0.5)) c.warnings.push_back("reliability p <= 1/2: guarantees inapplicable");
  }

  c.alpha_bar = alpha_bar(p.alpha0, p.nu, th, mu);
  c.rho = p.alpha0 * std::sqrt(p.gamma_max / p.gamma0);
  c.C0 = c.rho * (1 + c.rho);

  auto gb = gamma_bar(in.L, th, vt, p.gamma_max);
  if (!gb) {
    c.warnings.push_back("step threshold undefined: 1 - 2 vartheta - theta(1 - vartheta) <= 0");
    return c;
  }
  c.gamma_bar = *gb;
  c.D = std::max(std::log(p.gamma0 / c.gamma_bar) / std::log(1 / p.nu), 0.0);
  if (in.p_hat > 0.5) {
    c.C_lambda = 16 * p.gamma0 / (c.gamma_bar * p.alpha0 * p.alpha0) /
                 ((in.p_hat - 0.5) * (in.p_hat - 0.5));
  } else {
    c.warnings.push_back("p_hat <= 1/2: C_lambda undefined");
  }

  if (mu > 0) {
    if (!(vt > 0))
      throw ConfigError("theory constants: mu > 0 requires vartheta > 0");
    const double r = (1 - vt) * std::sqrt(2 * th * mu * c.gamma_bar);
    if (!(r > 0 && r < 1))
      throw ConfigError("theory constants: (1-vartheta) sqrt(2 theta mu gamma_bar) outside (0,1)");
    c.C_kappa = -std::log1p(-r);
    c.C3 = p.eps_g * p.eps_g / (2 * mu) + 2 * p.eps_f;
    c.C4 = 1 / (1 - c.alpha_bar);
    c.C5 = c.alpha_bar / (2 * mu * (1 - c.alpha_bar) * vt * (1 - vt));
    c.C3p = c.C3 + c.C4 * p.eps_f + c.C5 * p.eps_g * p.eps_g;
    double pr = std::isnan(c.p) ? in.p_hat : c.p;
    if (std::isnan(c.p)) c.warnings.push_back("oracle moments absent: p_hat used in place of p");
    double t1 = p.eps_g * p.eps_g / (2 * mu * vt * vt);
    double t2 = (1 - vt) * p.eps_f / vt;
    double t3 = kNaN;
    if (pr > 0.5) {
      double den = std::pow(1 - r, -(pr - 0.5)) - 1;
      t3 = (c.C3p + c.C4 * in.S_f + c.C5 * in.S_g) / den;
      c.eps_phi = std::max({t1, t2, t3});
    } else {
      c.eps_phi = kNaN;
    }
  } else {
    if (!(vt > 0)) {
      c.warnings.push_back("vartheta = 0: precision floors undefined");
      return c;
    }
    c.eps_grad = p.eps_g / vt;
    if (in.B) {
      const double B = *in.B;
      c.eps_phi = (B * p.eps_g + 2 * (1 - vt) * p.eps_f) / vt;
      double eg = in.moments ? in.moments->eps_g : 0.0;
      double ef = in.moments ? in.moments->eps_f : 0.0;
      c.eps0 = c.C0 * c.C_lambda * (2 * B / (1 - vt) * (eg + in.S_g) + ef + in.S_f);
    } else {
      c.warnings.push_back("trajectory bound B absent: eps'_phi and eps_0 omitted");
    }
  }
  return c;
}

bool stop_hit(const TrialRecord& r, double eps_phi, double eps_grad) {
  return std::min(r.gap_xp, r.gap_y) <= eps_phi || r.grad_norm_y <= eps_grad;
}

std::optional<long> stopping_time(const RunTrace& trace, double eps_phi,
                                  double eps_grad) {
  for (const TrialRecord& r : trace.records)
    if (stop_hit(r, eps_phi, eps_grad)) return r.t;
  return std::nullopt;
}

TruncationCheck truncation_extrapolation_check(const RunTrace& trace) {
  TruncationCheck out;
  const auto& R = trace.records;
  for (std::size_t k = 1; k < R.size(); ++k) {
    const TrialRecord& prev = R[k - 1];
    const TrialRecord& cur = R[k];
    if (!prev.accepted) continue;
    if (prev.vartheta != cur.vartheta || prev.theta != cur.theta) continue;
    if (cur.vartheta < truncation_threshold(cur.theta)) continue;
    const double a = prev.alpha;
    const double th = prev.theta;
    const double K = (1 - a) / a * prev.step_norm +
                     std::abs(2 * th / a + th - 2) * prev.gamma * prev.g_norm;
    ++out.checked;
    if (cur.step_norm > (1 - cur.vartheta) * K * (1 + 1e-9) + 1e-14) ++out.violations;
  }
  return out;
}

}  // namespace raas
