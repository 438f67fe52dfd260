#include "raas/problems.hpp"

#include <cmath>
#include <random>

#include "raas/rng.hpp"

namespace raas {

namespace {

Mat gaussian_matrix(int rows, int cols, std::uint64_t key) {
  SplitMix64 g(key);
  std::normal_distribution<double> n01;
  Mat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = n01(g);
  return m;
}

Vec gaussian_vector(int d, std::uint64_t key) {
  SplitMix64 g(key);
  std::normal_distribution<double> n01;
  Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = n01(g);
  return v;
}

// log(1 + exp(z)) without overflow.
double softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// 1 / (1 + exp(-z)).
double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

Vec QuadraticProblem::apply_q(const Vec& x) const {
  Vec c = V.transpose() * x;
  return V * eig.cwiseProduct(c);
}

double QuadraticProblem::value(const Vec& x) const {
  return phi_star + gap(x);
}

Vec QuadraticProblem::gradient(const Vec& x) const {
  return apply_q(x - x_star);
}

double QuadraticProblem::gap(const Vec& x) const {
  Vec c = V.transpose() * (x - x_star);
  return 0.5 * c.dot(eig.cwiseProduct(c));
}

std::shared_ptr<QuadraticProblem> make_quadratic(const QuadraticSpec& spec) {
  if (spec.d < 10) throw ConfigError("quadratic: d must be >= 10");
  if (!(spec.L > 0)) throw ConfigError("quadratic: L must be > 0");
  if (spec.mu < 0 || spec.mu > spec.L)
    throw ConfigError("quadratic: mu must lie in [0, L]");

  const int d = spec.d;
  auto p = std::make_shared<QuadraticProblem>();
  p->d = d;
  p->L = spec.L;
  p->mu = spec.mu;

  Mat G = gaussian_matrix(d, d, counter_key(spec.seed, kStreamProblem, 0));
  Eigen::HouseholderQR<Mat> qr(G);
  p->V = qr.householderQ() * Mat::Identity(d, d);

  p->eig.resize(d);
  if (spec.mu > 0) {
    for (int i = 0; i < d; ++i)
      p->eig(i) = spec.mu + (spec.L - spec.mu) * i / double(d - 1);
  } else {
    for (int i = 0; i < d; ++i) p->eig(i) = spec.L * i / double(d - 1);
    const int z = d / 10;
    for (int i = 0; i < z; ++i) p->eig(i) = 0.0;
  }

  p->x_star = gaussian_vector(d, counter_key(spec.seed, kStreamProblem, 1));
  Vec qx = p->apply_q(p->x_star);
  p->b = -qx;
  p->phi_star = -0.5 * p->x_star.dot(qx);
  p->x0 = gaussian_vector(d, counter_key(spec.seed, kStreamInit, 0));
  return p;
}

double LogisticProblem::value(const Vec& w) const {
  Vec m = A * w;
  double s = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) s += softplus(-y(i) * m(i));
  return s / double(m.size()) + 0.5 * lambda * w.squaredNorm();
}

Vec LogisticProblem::gradient(const Vec& w) const {
  Vec m = A * w;
  Vec r(m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i)
    r(i) = -y(i) * sigmoid(-y(i) * m(i));
  return A.transpose() * r / double(m.size()) + lambda * w;
}

double top_gram_eigenvalue(const Mat& A, double rel_tol, long max_iter) {
  const double n = double(A.rows());
  Vec v = Vec::Ones(A.cols()).normalized();
  double prev = 0.0;
  for (long k = 0; k < max_iter; ++k) {
    Vec w = A.transpose() * (A * v) / n;
    double lam = v.dot(w);
    double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    if (k > 0 && std::abs(lam - prev) <= rel_tol * std::abs(lam)) return lam;
    prev = lam;
  }
  throw NumericError("power iteration did not converge");
}

std::shared_ptr<LogisticProblem> make_logistic(const LogisticSpec& spec) {
  if (spec.n < 1 || spec.d < 1) throw ConfigError("logistic: n, d must be >= 1");
  if (!(spec.lambda > 0)) throw ConfigError("logistic: lambda must be > 0");

  auto p = std::make_shared<LogisticProblem>();
  p->d = spec.d;
  p->lambda = spec.lambda;
  p->mu = spec.lambda;
  p->A = gaussian_matrix(spec.n, spec.d,
                         counter_key(spec.seed, kStreamProblem, 0));

  Vec w_true = gaussian_vector(spec.d, counter_key(spec.seed, kStreamProblem, 1));
  w_true.normalize();
  SplitMix64 g(counter_key(spec.seed, kStreamProblem, 2));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  p->y.resize(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    // Logistic noise by inversion; u is kept away from {0,1}.
    double u = std::min(std::max(u01(g), 1e-300), 1.0 - 1e-16);
    double noise = std::log(u) - std::log1p(-u);
    double s = p->A.row(i).dot(w_true) + noise;
    p->y(i) = s >= 0 ? 1.0 : -1.0;
  }

  p->L = 0.25 * top_gram_eigenvalue(p->A) + spec.lambda;
  p->x0 = gaussian_vector(spec.d, counter_key(spec.seed, kStreamInit, 0));

  ReferenceResult ref = reference_minimize(*p, Vec::Zero(spec.d));
  p->x_star = ref.x;
  p->phi_star = ref.value;
  p->reference_converged = ref.converged;
  return p;
}

ReferenceResult reference_minimize(const Problem& p, const Vec& start,
                                   long max_iter) {
  if (!(p.mu > 0)) throw ConfigError("reference_minimize requires mu > 0");
  ReferenceResult out;
  Vec x = start;
  Vec x_prev = start;
  Vec g0 = p.gradient(x);
  const double stop = 1e-12 * std::max(1.0, g0.norm());
  double Lk = p.L > 0 ? p.L : 1.0;

  Vec best = x;
  double best_g = g0.norm();
  long k = 0;
  for (; k < max_iter; ++k) {
    if (best_g <= stop) break;
    // Momentum from the current local curvature estimate.
    const double q = std::sqrt(std::min(1.0, p.mu / Lk));
    const double beta = (1.0 - q) / (1.0 + q);
    Vec y = x + beta * (x - x_prev);
    Vec gy = p.gradient(y);
    // Backtrack on the local Lipschitz estimate; gradient tests keep their
    // resolution after function values stop separating in floating point.
    Vec xn, gn;
    for (;;) {
      xn = y - gy / Lk;
      gn = p.gradient(xn);
      if ((gn - gy).norm() <= Lk * (xn - y).norm() * (1 + 1e-12)) break;
      Lk *= 2.0;
    }
    // Gradient restart: drop momentum when it points uphill.
    const bool restart = gy.dot(xn - x) > 0;
    x_prev = restart ? xn : x;
    x = std::move(xn);
    Lk = std::max(Lk * 0.9, p.mu);
    const double n = gn.norm();
    if (n < best_g) {
      best_g = n;
      best = x;
    }
  }
  out.x = best;
  out.value = p.value(best);
  out.grad_norm = best_g;
  out.iterations = k;
  out.converged = best_g <= stop;
  return out;
}

}  // namespace raas
