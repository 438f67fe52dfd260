#include <doctest.h>

#include <cmath>

#include "raas/diagnostics.hpp"

using namespace raas;

namespace {

RunTrace exact_run(const ProblemPtr& p, double theta, double vartheta, long T,
                   RaasParams* out = nullptr, double sigma_f = 0.0, double sigma_g = 0.0) {
  NoiseConfig nc;
  nc.sigma_f = sigma_f;
  nc.sigma_g = sigma_g;
  NoiseTape tape(42, p->d, nc, 5 * T);
  Oracle o(p, &tape);
  RaasParams prm;
  prm.mu = p->mu;
  prm.theta = theta;
  prm.vartheta = vartheta;
  prm.gamma0 = 0.15 / p->L;
  prm.tol_mode = ToleranceMode::Constant;
  prm.eps_f = sigma_f > 0 ? 0.6 : 1e-10;
  prm = finalize(prm);
  if (out) *out = prm;
  return run(o, prm, T);
}

}  // namespace

TEST_CASE("auxiliary state") {
  Vec x = Vec::Zero(2), xp = Vec::Zero(2), xb(2);
  xb << 1, 0;
  Vec z = z_state(x, xp, xb, 0.5, 0.0);
  CHECK(z[0] == doctest::Approx(1.0));
  CHECK(z[1] == 0.0);
  // Initialization collapse and the vartheta -> 1 limit.
  CHECK(z_state(x, xb, xb, 0.3, 0.2) == x);
  CHECK((z_state(x, xp, xb, 0.5, 1.0 - 1e-12) - x).norm() < 1e-11);
}

TEST_CASE("Lyapunov value") {
  CHECK(lyapunov(0.5, 1.0, 0.5, 1.0, 0.5, 0.0) == doctest::Approx(0.625));
  CHECK(lyapunov(0.0, 0.0, 0.5, 1.0, 0.5, 0.0) == 0.0);
  auto p = make_quadratic({20, 5.0, 0.0, 1});
  const double a0 = 0.3, g0 = 0.02, th = 0.4, vt = 0.1;
  const double want = p->gap(p->x0) + a0 * a0 * (p->x0 - p->x_star).squaredNorm() /
                                          (4 * th * (1 - vt) * (1 - vt) * g0);
  CHECK(lyapunov(*p, p->x0, p->x0, a0, g0, th, vt) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("compensation term special cases") {
  TrialRecord r;
  r.alpha = 0.3;
  r.vartheta = 0.0;
  r.gap_y = 2.0;
  r.dist_y_sq = 5.0;
  CHECK(compensation_term(r, 1.0) == 0.0);
  r.vartheta = 0.2;
  CHECK(compensation_term(r, 0.0) == doctest::Approx(0.2 * 0.3 / 0.8 * 2.0));
}

TEST_CASE("quasi-descent holds strictly on an exact run") {
  auto p = make_quadratic({40, 5.0, 0.0, 2});
  RunTrace tr = exact_run(p, 0.4, 0.1, 50);
  QuasiDescentReport q = quasi_descent_check(tr, 0.0);
  CHECK(q.terms.size() > 10);
  CHECK(q.violations == 0);
  for (const auto& t : q.terms) CHECK(t.residual > 0);
}

TEST_CASE("quasi-descent skips the truncated regime") {
  auto p = make_quadratic({40, 5.0, 0.0, 2});
  RunTrace tr = exact_run(p, 0.4, 0.5, 30);
  QuasiDescentReport q = quasi_descent_check(tr, 0.0);
  CHECK(q.terms.empty());
  CHECK(q.skipped > 0);
}

TEST_CASE("lambda envelopes with no accepted trial") {
  RaasParams p;
  p.gamma0 = 1.0;
  p.alpha0 = 0.5;
  RunTrace tr;
  TrialRecord r;
  r.accepted = false;
  r.gamma = 1.0;
  r.alpha = 0.5;
  r.alpha_hat = 0.4;
  r.theta = p.theta;
  tr.records.push_back(r);
  EnvelopeReport e = lambda_envelopes(tr, p);
  CHECK(e.ok());
}

TEST_CASE("one accepted trial at constant step satisfies Part A with equality") {
  const double a1 = alpha_root(0.25, 0.0);
  CHECK(a1 == doctest::Approx(0.3903882).epsilon(1e-7));
  const double lambda = 1 - a1;
  CHECK(lambda == doctest::Approx(a1 * a1 / 0.25).epsilon(1e-12));
  RaasParams p;
  p.gamma0 = 1.0;
  p.alpha0 = 0.5;
  RunTrace tr;
  TrialRecord r;
  r.accepted = true;
  r.gamma = 1.0;
  r.alpha = a1;
  r.alpha_hat = a1;
  r.theta = p.theta;
  r.vartheta = p.vartheta;
  tr.records.push_back(r);
  CHECK(lambda_envelopes(tr, p).ok());
}

TEST_CASE("envelopes hold on generated traces") {
  RaasParams prm;
  SUBCASE("general convex, noisy") {
    auto p = make_quadratic({40, 5.0, 0.0, 3});
    RunTrace tr = exact_run(p, 0.4, 0.1, 300, &prm, 1.0, 0.1);
    EnvelopeReport e = lambda_envelopes(tr, prm);
    CHECK(e.ok());
  }
  SUBCASE("strongly convex, exact") {
    auto p = make_quadratic({40, 1.0, 0.05, 3});
    RunTrace tr = exact_run(p, 0.4, 0.1, 100, &prm);
    EnvelopeReport e = lambda_envelopes(tr, prm);
    CHECK(e.part_a == 0);
    CHECK(e.part_c == 0);
    CHECK(e.part_d == 0);
  }
}

TEST_CASE("gamma_bar and theory constants for the worked example") {
  auto gb = gamma_bar(5.0, 0.5, 0.1, 1 / (2 * 0.81));
  REQUIRE(gb.has_value());
  CHECK(*gb == doctest::Approx(2 * (1 - 0.2 - 0.45) / (5 * 0.9)).epsilon(1e-12));
  CHECK_FALSE(gamma_bar(5.0, 0.9, 0.5, 1.0).has_value());

  TheoryInputs in;
  in.params.mu = 1.0;
  in.params.theta = 0.5;
  in.params.vartheta = 0.1;
  in.params.gamma0 = 0.05;
  in.params.eps_f = 1.0;
  in.params.eps_g = 1.0;
  in.params = finalize(in.params);
  in.L = 5.0;
  TheoryConstants c = theory_constants(in);
  const double g = 0.7 / 4.5;
  CHECK(c.gamma_bar == doctest::Approx(g).epsilon(1e-12));
  CHECK(c.C_kappa == doctest::Approx(-std::log(1 - 0.9 * std::sqrt(g))).epsilon(1e-12));
  CHECK(c.C_kappa == doctest::Approx(0.4385).epsilon(1e-3));
  CHECK(c.D == 0.0);  // gamma_bar >= gamma0

  in.params.vartheta = 0.0;
  CHECK_THROWS_AS(theory_constants(in), ConfigError);
}

TEST_CASE("indicators") {
  auto p = make_quadratic({20, 5.0, 0.0, 1});
  RunTrace tr = exact_run(p, 0.4, 0.1, 40);
  IndicatorReport r = indicators(tr, 1.0, 1.0, gamma_bar(p->L, 0.4, 0.1, 1.0), -1);
  CHECK(r.p_hat == 1.0);
  for (int i : r.I) CHECK(i == 1);

  RunTrace b;
  TrialRecord x;
  x.W = 0.25;
  x.D = 0.0;
  x.scaling = 1.0;
  x.accepted = true;
  b.records.push_back(x);
  CHECK(indicators(b, 0.25, 1.0, std::nullopt).I[0] == 1);
}

TEST_CASE("stopping time matches a brute-force scan") {
  auto p = make_quadratic({30, 1.0, 0.1, 5});
  RunTrace tr = exact_run(p, 0.4, 0.1, 400);
  const double eps = 1e-4;
  long brute = -1;
  for (const auto& r : tr.records)
    if (std::min(r.gap_xp, r.gap_y) <= eps) {
      brute = r.t;
      break;
    }
  auto t = stopping_time(tr, eps, 0.0);
  REQUIRE(t.has_value());
  CHECK(*t == brute);
  CHECK(stopping_time(tr, 1e300, 0.0) == 1);
  CHECK_FALSE(stopping_time(tr, 0.0, 0.0).has_value());
}

TEST_CASE("truncated-branch extrapolation bound") {
  auto p = make_quadratic({40, 5.0, 0.0, 4});
  RunTrace tr = exact_run(p, 0.4, 0.6, 200, nullptr, 1.0, 0.1);
  TruncationCheck c = truncation_extrapolation_check(tr);
  CHECK(c.checked > 0);
  CHECK(c.violations == 0);
}
