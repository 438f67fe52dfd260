#include <doctest.h>

#include <cmath>
#include <random>

#include "raas/problems.hpp"

using namespace raas;

namespace {

// Dense Q rebuilt from the stored factors; independent of apply_q.
Mat dense_q(const QuadraticProblem& p) { return p.V * p.eig.asDiagonal() * p.V.transpose(); }

}  // namespace

TEST_CASE("quadratic default family has d/10 zero eigenvalues and mu = 0") {
  QuadraticSpec s;
  s.d = 1000;
  s.L = 5;
  s.seed = 3;
  auto p = make_quadratic(s);
  int zeros = 0;
  for (int i = 0; i < p->d; ++i) zeros += p->eig[i] == 0.0;
  CHECK(zeros == 100);
  CHECK(p->mu == 0.0);
  CHECK(p->L == doctest::Approx(5.0));
  CHECK(p->eig.maxCoeff() == doctest::Approx(5.0));
}

TEST_CASE("quadratic gradient vanishes at the minimizer") {
  auto p = make_quadratic({50, 2.0, 0.0, 9});
  CHECK(p->gradient(p->x_star).norm() <= 1e-12 * std::max(1.0, p->x_star.norm()));
  CHECK(p->gap(p->x_star) == 0.0);
}

TEST_CASE("quadratic optimal value matches a dense re-evaluation") {
  auto p = make_quadratic({10, 1.0, 0.0, 17});
  Mat Q = dense_q(*p);
  const double direct = -0.5 * p->x_star.dot(Q * p->x_star);
  CHECK(p->phi_star == doctest::Approx(direct).epsilon(1e-12));
  // b = -Q x*
  CHECK((p->b + Q * p->x_star).norm() <= 1e-12 * std::max(1.0, p->b.norm()));
}

TEST_CASE("quadratic value and gradient agree with naive dense evaluation") {
  auto p = make_quadratic({80, 5.0, 0.0, 2});
  Mat Q = dense_q(*p);
  std::mt19937_64 g(1);
  std::normal_distribution<double> n;
  for (int k = 0; k < 20; ++k) {
    Vec x(p->d);
    for (int i = 0; i < p->d; ++i) x[i] = 3 * n(g);
    const double v = 0.5 * x.dot(Q * x) + p->b.dot(x);
    CHECK(p->value(x) == doctest::Approx(v).epsilon(1e-10));
    Vec gd = Q * x + p->b;
    CHECK((p->gradient(x) - gd).norm() <= 1e-10 * std::max(1.0, gd.norm()));
  }
}

TEST_CASE("strongly convex quadratic extension spaces eigenvalues in [mu, L]") {
  auto p = make_quadratic({50, 1.0, 0.1, 4});
  CHECK(p->mu == doctest::Approx(0.1));
  CHECK(p->eig.minCoeff() == doctest::Approx(0.1));
  CHECK(p->eig.maxCoeff() == doctest::Approx(1.0));
}

TEST_CASE("problem generation is deterministic per seed") {
  auto a = make_quadratic({30, 5.0, 0.0, 11});
  auto b = make_quadratic({30, 5.0, 0.0, 11});
  auto c = make_quadratic({30, 5.0, 0.0, 12});
  CHECK(a->V == b->V);
  CHECK(a->x_star == b->x_star);
  CHECK(a->x0 == b->x0);
  CHECK(a->phi_star == b->phi_star);
  CHECK(a->x_star != c->x_star);
}

TEST_CASE("smoothness and convexity sandwich on random pairs") {
  std::mt19937_64 g(5);
  std::normal_distribution<double> n;
  std::vector<ProblemPtr> probs{make_quadratic({40, 5.0, 0.0, 1}),
                                make_quadratic({40, 2.0, 0.5, 2}),
                                make_logistic({200, 10, 0.1, 3})};
  for (const auto& p : probs) {
    long bad = 0;
    for (int k = 0; k < 1000; ++k) {
      Vec x(p->d), y(p->d);
      for (int i = 0; i < p->d; ++i) {
        x[i] = n(g);
        y[i] = n(g);
      }
      const double lin = p->value(x) + p->gradient(x).dot(y - x);
      const double r2 = (y - x).squaredNorm();
      const double fy = p->value(y);
      const double tol = 1e-9 * std::max(1.0, std::abs(fy));
      if (fy < lin + 0.5 * p->mu * r2 - tol) ++bad;
      if (fy > lin + 0.5 * p->L * r2 + tol) ++bad;
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("logistic regularizer-dominated instance has value log 2 at zero") {
  auto p = make_logistic({20, 3, 1e6, 1});
  CHECK(p->mu == 1e6);
  CHECK(p->x_star.norm() < 1e-6);
  CHECK(p->phi_star == doctest::Approx(std::log(2.0)).epsilon(1e-6));
}

TEST_CASE("logistic reference solution matches an independent gradient descent") {
  auto p = make_logistic({50, 5, 0.1, 8});
  CHECK(p->reference_converged);
  CHECK(p->gradient(p->x_star).norm() <= 1e-10);
  // Plain gradient descent with step 1/L as the independent solver.
  Vec w = Vec::Zero(p->d);
  for (int k = 0; k < 20000; ++k) w -= p->gradient(w) / p->L;
  CHECK(p->phi_star == doctest::Approx(p->value(w)).epsilon(1e-8));
  CHECK(p->L > p->mu);
}

TEST_CASE("logistic desk instance is mildly conditioned") {
  auto p = make_logistic({600, 50, 0.1, 1});
  CHECK(p->mu == doctest::Approx(0.1));
  CHECK(p->L / p->mu > 1.0);
  CHECK(std::isfinite(p->L / p->mu));
}

TEST_CASE("reference_minimize on a 1-d quadratic") {
  struct Scalar : Problem {
    double value(const Vec& x) const override { return 0.5 * mu * x[0] * x[0]; }
    Vec gradient(const Vec& x) const override { return mu * x; }
  } s;
  s.d = 1;
  s.mu = s.L = 2.0;
  Vec x0(1);
  x0 << 1.0;
  ReferenceResult r = reference_minimize(s, x0);
  CHECK(std::abs(r.x[0]) < 1e-12);
  CHECK(std::abs(r.value) < 1e-12);
}

TEST_CASE("reference_minimize recovers the closed-form quadratic minimizer") {
  auto p = make_quadratic({30, 3.0, 0.3, 6});
  ReferenceResult r = reference_minimize(*p, p->x0);
  CHECK(r.converged);
  Mat Q = dense_q(*p);
  Vec closed = -Q.ldlt().solve(p->b);
  CHECK((r.x - closed).norm() < 1e-8);
}

TEST_CASE("power iteration finds the top Gram eigenvalue") {
  Mat A = Mat::Zero(4, 2);
  A << 2, 0, 0, 1, 0, 0, 0, 0;
  CHECK(top_gram_eigenvalue(A) == doctest::Approx(1.0).epsilon(1e-9));  // 4/4
}
