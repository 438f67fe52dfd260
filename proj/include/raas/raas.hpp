#pragma once

#include <optional>
#include <vector>

#include "raas/oracles.hpp"
#include "raas/problems.hpp"

namespace raas {

enum class ToleranceMode { Theory, Constant };

struct SwitchConfig {
  bool enabled = false;
  bool switch_theta = true;  // false: vartheta switch only
  int n_vartheta = 20;
  int n_theta = 50;
  double vartheta_safe = 1.0 - 1e-3;
  double theta_safe = 0.5;
  bool disable_check2_on_theta_switch = false;
};

struct RaasParams {
  double mu = 0.0;
  double nu = 0.9;
  double theta = 0.4;
  double vartheta = 0.1;
  double gamma_max = 0.0;  // <= 0: default (see finalize)
  double gamma0 = 0.0;
  double alpha0 = 0.0;     // <= 0: midpoint of the admissible interval
  ToleranceMode tol_mode = ToleranceMode::Theory;
  double eps_f = 1.0;      // eps_f'
  double eps_g = 1.0;      // eps_g'
  bool check2 = true;
  bool no_momentum = false;  // y = x on every trial (momentum-free search)
  SwitchConfig sw;
};

// Fills gamma_max and alpha0 defaults and validates. Throws ConfigError.
RaasParams finalize(RaasParams p);

// gamma_max = 1/(2(1-vartheta)^2 mu) for mu > 0, otherwise 100 gamma0.
double default_gamma_max(double mu, double vartheta, double gamma0);

// Admissible open interval for alpha0.
std::pair<double, double> alpha0_interval(const RaasParams& p);

// Positive root of a^2/g_hat = (1-a) a_prev^2/g_prev + 2 theta (1-vartheta)^2 mu a.
double solve_alpha(double gamma_hat, double gamma_prev, double alpha_prev,
                   double theta, double vartheta, double mu);

// Positive root of a^2 + (b-c) a - b = 0.
double alpha_root(double b, double c);

struct Momentum {
  double rho = 0.0;
  double beta = 0.0;
};

Momentum momentum_coefficients(double alpha_hat, double alpha_prev,
                               double gamma_hat, double theta, double vartheta,
                               double mu);

// gamma/(1-alpha) * max{2 theta - alpha/(1-vartheta), 2 theta + (theta-2) alpha}.
double auxiliary_step(double gamma, double alpha, double theta, double vartheta);

// (1-theta)/(2-theta): above it the truncated branch of auxiliary_step is active.
double truncation_threshold(double theta);

struct Tolerances {
  double eps_f = 0.0;
  double eps_g = 0.0;
  double scaling = 1.0;  // E_t multiplying eps_f' in the reliability indicator
};

Tolerances tolerances(ToleranceMode mode, double mu, double eps_f_prime,
                      double eps_g_prime, double alpha_hat, double step_norm);

// Conditions (I) and (II).
bool check_acceptance(double f_x, double f_y, double f_xp, const Vec& G,
                      const Vec& y, const Vec& x, double gamma_hat,
                      double theta, double eps_f, double eps_g, bool check2);

double step_size_update(double gamma_hat, bool accepted, double nu,
                        double gamma_max);

struct RaasState {
  long t = 1;  // index of the next trial (1-based)
  Vec x, x_prev, xbar;
  double gamma_prev = 0.0;  // retained gamma_{t-1}
  double gamma_hat = 0.0;   // trial step for trial t
  double alpha_prev = 0.0;  // retained alpha_{t-1}
  double theta = 0.0;
  double vartheta = 0.0;
  bool check2 = true;
  // stagnation switch bookkeeping
  double gamma_rec = 0.0;
  long k_stag = 0;
  bool s_vartheta = false;
  bool s_theta = false;
};

RaasState initial_state(const RaasParams& p, const Vec& x1);

// Algorithm-2 update at the start of a trial.
void switch_update(RaasState& s, const SwitchConfig& sw);

// Per-trial log. Fields not applicable to a method are NaN.
struct TrialRecord {
  long t = 0;
  bool accepted = false;
  double gamma_hat = 0, gamma = 0;  // trial step; retained step after the trial
  double alpha_hat = 0, alpha = 0;  // trial alpha; retained alpha after the trial
  double alpha_prev = 0, gamma_prev = 0;
  double rho_hat = 0, beta_hat = 0;
  double gamma_aux = 0;             // NaN when rejected
  double W = 0, D = 0;
  double e_x = 0, e_y = 0, e_xp = 0;
  double eps_f = 0, eps_g = 0, scaling = 1;
  double theta = 0, vartheta = 0;
  bool check2 = true;
  double step_norm = 0;             // |y - x|
  double g_norm = 0;                // |G|
  // Exact-oracle diagnostics, evaluated read-only.
  double gap = 0;                   // phi(x_{t+1}) - phi*
  double gap_x = 0;                 // phi(x_t) - phi*
  double gap_y = 0;                 // phi(y_t) - phi*
  double gap_xp = 0;                // phi(y_t - gamma_hat G_t) - phi*
  double grad_norm_y = 0;
  double dist_y_sq = 0;             // |y_t - x*|^2
  double inner_err = 0;             // <y_t - x*, grad(y_t) - G_t>
  double dist_z = 0;                // |z_t - x*|
  double y_z = 0;                   // |y_t - z_t|
  double Phi = 0;                   // Lyapunov at the start of the trial
  double Phi_next = 0;              // Lyapunov after the trial, same (theta, vartheta)
};

struct StopRule {
  double eps_phi = 0.0;
  double eps_grad = 0.0;
};

struct RunTrace {
  std::vector<TrialRecord> records;
  std::optional<long> t_eps;
  double seconds = 0.0;
};

// One full trial; advances the state and returns its record.
TrialRecord trial(RaasState& s, const Oracle& oracle, const RaasParams& p);

RunTrace run(const Oracle& oracle, const RaasParams& p, long T,
             std::optional<StopRule> stop = std::nullopt);

}  // namespace raas
