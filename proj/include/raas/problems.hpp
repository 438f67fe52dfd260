#pragma once

#include <cstdint>
#include <memory>

#include <Eigen/Dense>

#include "raas/errors.hpp"

namespace raas {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Smooth convex objective with exact oracles and known constants.
// Immutable after construction.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual double value(const Vec& x) const = 0;
  virtual Vec gradient(const Vec& x) const = 0;
  // phi(x) - phi*, evaluated without cancellation where the structure allows.
  virtual double gap(const Vec& x) const { return value(x) - phi_star; }

  int d = 0;
  double mu = 0.0;
  double L = 0.0;
  Vec x_star;
  double phi_star = 0.0;
  Vec x0;  // fixed initial point shared by every run on this instance
  bool reference_converged = true;
};

using ProblemPtr = std::shared_ptr<const Problem>;

struct QuadraticSpec {
  int d = 1000;
  double L = 5.0;
  // 0 reproduces the general-convex family (floor(d/10) zero eigenvalues).
  // >0 spaces all eigenvalues in [mu, L] with no zeros.
  double mu = 0.0;
  std::uint64_t seed = 0;
};

struct LogisticSpec {
  int n = 6000;
  int d = 500;
  double lambda = 0.1;
  std::uint64_t seed = 0;
};

// phi(x) = 1/2 x'Qx + b'x with Q = V diag(eig) V'.
class QuadraticProblem : public Problem {
 public:
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  double gap(const Vec& x) const override;
  Vec apply_q(const Vec& x) const;

  Mat V;
  Vec eig;
  Vec b;
};

// phi(w) = (1/n) sum log(1 + exp(-y_i a_i'w)) + lambda/2 |w|^2.
class LogisticProblem : public Problem {
 public:
  double value(const Vec& w) const override;
  Vec gradient(const Vec& w) const override;

  Mat A;  // n x d
  Vec y;  // labels in {-1, +1}
  double lambda = 0.0;
};

std::shared_ptr<QuadraticProblem> make_quadratic(const QuadraticSpec& spec);
std::shared_ptr<LogisticProblem> make_logistic(const LogisticSpec& spec);

struct ReferenceResult {
  Vec x;
  double value = 0.0;
  double grad_norm = 0.0;
  long iterations = 0;
  bool converged = false;  // false: cap reached, best iterate returned
};

// Accelerated gradient with backtracking on exact oracles; requires mu > 0.
ReferenceResult reference_minimize(const Problem& p, const Vec& start,
                                   long max_iter = 100000);

// Top eigenvalue of A'A/n by power iteration.
double top_gram_eigenvalue(const Mat& A, double rel_tol = 1e-10,
                           long max_iter = 100000);

}  // namespace raas
