#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "raas/raas.hpp"

namespace raas {

// z_t = x_t + (1-alpha_{t-1})/alpha_{t-1} * (1-vartheta) * (xbar_t - x_{t-1}).
Vec z_state(const Vec& x, const Vec& x_prev, const Vec& xbar, double alpha_prev,
            double vartheta);

// Phi_t = gap + alpha^2/(4 theta (1-vartheta)^2 gamma) * |z - x*|^2.
double lyapunov(double gap_x, double dist_z_sq, double alpha_prev,
                double gamma_prev, double theta, double vartheta);
double lyapunov(const Problem& p, const Vec& x, const Vec& z, double alpha_prev,
                double gamma_prev, double theta, double vartheta);

struct QuasiDescentTerm {
  long t = 0;
  double lhs = 0;  // Phi_{t+1}
  double rhs = 0;  // (1-alpha) Phi_t - T_C + T_E
  double T_C = 0;
  double T_E = 0;
  double residual = 0;  // rhs - lhs
  double tol = 0;       // 1e-9 * max(1, Phi_t)
};

struct QuasiDescentReport {
  std::vector<QuasiDescentTerm> terms;
  long skipped = 0;  // accepted trials outside the pre-truncation regime
  long violations = 0;
  double worst = 0;  // most negative residual + tol
};

// Compensation term T_C and oracle-error term T_E for one accepted trial.
double compensation_term(const TrialRecord& r, double mu);
double error_term(const TrialRecord& r);

QuasiDescentReport quasi_descent_check(const RunTrace& trace, double mu);

struct EnvelopeReport {
  long checked = 0;
  long part_a = 0;  // violations of each part
  long part_b = 0;
  long part_c = 0;
  long part_d = 0;
  double worst_a = 0;  // largest relative breach
  double worst_b = 0;
  double worst_c = 0;
  double worst_d = 0;
  double alpha_bar = 0;
  bool ok() const { return part_a + part_b + part_c + part_d == 0; }
};

// 2 / (sqrt((1 - c nu)^2 + 4 nu) + 1 - c nu) with c = theta sgn(mu), maxed with alpha0.
double alpha_bar(double alpha0, double nu, double theta, double mu);

// Contraction-product envelopes and the uniform alpha bound over a trace.
EnvelopeReport lambda_envelopes(const RunTrace& trace, const RaasParams& p,
                                double rel_tol = 1e-9);

struct IndicatorReport {
  std::vector<int> I;
  std::vector<int> Lambda;  // -1 when the threshold is undefined
  double p_hat = 0;
  long violations = 0;      // trials with (1-Lambda) I > Theta
  long considered = 0;
  bool lambda_defined = true;
};

// Reliability and large-step indicators; only trials with index < t_limit
// enter the violation count.
IndicatorReport indicators(const RunTrace& trace, double eps_g_prime,
                           double eps_f_prime, std::optional<double> gamma_bar,
                           long t_limit = -1);

// min{2(1-2 vartheta - theta(1-vartheta)) / (L(1-vartheta)), gamma_max}; empty
// when the numerator is <= 0.
std::optional<double> gamma_bar(double L, double theta, double vartheta,
                                double gamma_max);

struct OracleMoments {
  double eps_g = 0, eps_f = 0;
  double upsilon_g = 0, upsilon_f = 0;
  double delta = 1, varrho = 1;
};

struct TheoryInputs {
  RaasParams params;  // finalized
  double L = 1.0;
  std::optional<OracleMoments> moments;
  double S_f = 0.0, S_g = 0.0;
  double p_hat = 0.75;
  std::optional<double> B;  // trajectory bound, mu = 0 only
};

struct TheoryConstants {
  double gamma_bar = NAN;
  double D = NAN;
  double alpha_bar = NAN;
  double rho = NAN;
  double C0 = NAN;
  double C_lambda = NAN;
  double C_kappa = NAN;
  double C3 = NAN, C4 = NAN, C5 = NAN, C3p = NAN;
  double eps_phi = NAN;   // eps'_phi
  double eps_grad = NAN;  // eps'_grad
  double eps0 = NAN;
  double p = NAN;
  std::vector<std::string> warnings;
};

TheoryConstants theory_constants(const TheoryInputs& in);

// First trial whose exact gap or gradient norm meets the target.
std::optional<long> stopping_time(const RunTrace& trace, double eps_phi,
                                  double eps_grad);
bool stop_hit(const TrialRecord& r, double eps_phi, double eps_grad);

struct TruncationCheck {
  long checked = 0;
  long violations = 0;
};

// On truncated-branch trials whose predecessor was accepted under the same
// vartheta: |y_t - x_t| <= (1 - vartheta) K_t.
TruncationCheck truncation_extrapolation_check(const RunTrace& trace);

}  // namespace raas
