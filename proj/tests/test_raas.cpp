#include <doctest.h>

#include <cmath>
#include <random>

#include "raas/raas.hpp"

using namespace raas;

namespace {

RaasParams quad_params(const Problem& p, double gamma0) {
  RaasParams r;
  r.mu = p.mu;
  r.gamma0 = gamma0;
  r.eps_f = 1e-12;
  r.eps_g = 1e-6;
  return finalize(r);
}

}  // namespace

TEST_CASE("alpha root closed forms") {
  CHECK(alpha_root(1.0, 0.0) == doctest::Approx((std::sqrt(5.0) - 1) / 2).epsilon(1e-15));
  CHECK(alpha_root(0.25, 0.0) == doctest::Approx(0.3903882032).epsilon(1e-10));
  const double a = alpha_root(0.25, 0.1);
  CHECK(a == doctest::Approx((-0.15 + std::sqrt(0.0225 + 1)) / 2).epsilon(1e-12));
  CHECK(std::abs(a * a + 0.15 * a - 0.25) < 1e-12);
}

TEST_CASE("solve_alpha reduces to the golden ratio root") {
  CHECK(solve_alpha(0.7, 0.7, 1.0, 0.4, 0.1, 0.0) ==
        doctest::Approx(0.6180339887).epsilon(1e-10));
}

TEST_CASE("solve_alpha residual on random tuples") {
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    const double gp = std::exp(8 * u(g) - 4);
    const double gh = gp * (0.5 + u(g));
    const double ap = 0.01 + 0.98 * u(g);
    const double th = 0.05 + 0.9 * u(g), vt = 0.95 * u(g);
    const double mu = u(g) < 0.5 ? 0.0 : u(g) * ap * ap / (2 * gh);
    const double a = solve_alpha(gh, gp, ap, th, vt, mu);
    const double base = ap * ap / gp;
    const double res = a * a / gh - (1 - a) * base - 2 * th * (1 - vt) * (1 - vt) * mu * a;
    CHECK(std::abs(res) <= 1e-12 * std::max(1.0, base));
    CHECK(a > 0);
    CHECK(a < 1);
  }
}

TEST_CASE("momentum coefficients") {
  Momentum m = momentum_coefficients(0.4, 0.5, 1.0, 0.4, 0.0, 0.0);
  CHECK(m.beta == 0.0);
  CHECK(m.rho == doctest::Approx(0.4));
  // Equal alphas give the classical 1 - alpha.
  CHECK(momentum_coefficients(0.3, 0.3, 1.0, 0.4, 0.0, 0.0).rho == doctest::Approx(0.7));
  // Large vartheta damps the extrapolation.
  for (double vt : {0.9, 0.99, 0.999}) {
    Momentum n = momentum_coefficients(0.4, 0.5, 1.0, 0.4, vt, 0.0);
    CHECK(n.rho <= (1 - vt) * (1 - 0.5) / 0.5 + 1e-15);
  }
  CHECK_THROWS_AS(momentum_coefficients(0.1, 0.5, 1.0, 0.5, 0.0, 1.0), InvariantError);
}

TEST_CASE("auxiliary step branches") {
  CHECK(auxiliary_step(1.0, 0.5, 0.5, 0.0) == doctest::Approx(1.0));
  const double tr = auxiliary_step(1.0, 0.4, 0.5, 0.5);
  CHECK(tr == doctest::Approx(0.4 / 0.6));
  CHECK(auxiliary_step(1.0, 0.4, 0.5, 0.8) == doctest::Approx(tr));
  CHECK(auxiliary_step(2.0, 1e-9, 0.3, 0.2) == doctest::Approx(2 * 0.3 * 2.0).epsilon(1e-6));
  // Branches coincide at the threshold.
  const double th = 0.4, v = truncation_threshold(th), a = 0.3;
  CHECK(2 * th - a / (1 - v) == doctest::Approx(2 * th + (th - 2) * a).epsilon(1e-14));
}

TEST_CASE("tolerance schedules") {
  Tolerances s = tolerances(ToleranceMode::Theory, 0.1, 1.0, 0.2, 0.5, 3.0);
  CHECK(s.eps_g == doctest::Approx(0.2));
  CHECK(s.eps_f == 1.0);
  Tolerances z = tolerances(ToleranceMode::Theory, 0.0, 1.0, 0.2, 0.5, 0.0);
  CHECK(z.eps_g == 0.0);
  CHECK(z.eps_f == 0.5);
  CHECK(z.scaling == 0.5);
  Tolerances c = tolerances(ToleranceMode::Constant, 0.0, 0.6, 123.0, 0.5, 9.0);
  CHECK(c.eps_f == 0.6);
  CHECK(c.eps_g == 0.6);
}

TEST_CASE("acceptance predicate") {
  Vec G(1), y(1), x(1);
  G << 1.0;
  y << 0.0;
  x << 0.0;
  // (I): 1 <= 2 - 0.5 with gamma theta |G|^2 = 0.5.
  CHECK(check_acceptance(100.0, 2.0, 1.0, G, y, x, 1.0, 0.5, 0.0, 0.0, false));
  // (II) with y = x and f_y = f_x holds for any nonnegative tolerances.
  CHECK(check_acceptance(2.0, 2.0, 1.0, G, y, x, 1.0, 0.5, 0.0, 0.0, true));
  CHECK_FALSE(check_acceptance(1.9, 2.0, 1.0, G, y, x, 1.0, 0.5, 0.0, 0.0, true));
  // Exact 1/2 x^2 at y = 1, G = 1, gamma = 1: accepted at the boundary.
  y << 1.0;
  CHECK(check_acceptance(0.5, 0.5, 0.0, G, y, y, 1.0, 0.5, 0.0, 0.0, true));
}

TEST_CASE("step-size update") {
  CHECK(step_size_update(1.0, true, 0.9, 2.0) == doctest::Approx(1 / 0.9));
  CHECK(step_size_update(1.9, true, 0.9, 2.0) == 2.0);
  CHECK(step_size_update(1.0, false, 0.9, 2.0) == doctest::Approx(0.9));
}

TEST_CASE("finalize validates parameters") {
  RaasParams p;
  p.gamma0 = 0.1;
  CHECK_NOTHROW(finalize(p));
  p.theta = 1.5;
  p.nu = 1.0;
  try {
    finalize(p);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string s = e.what();
    CHECK(s.find("theta") != std::string::npos);
    CHECK(s.find("nu") != std::string::npos);
  }
  RaasParams q;
  q.mu = 1.0;
  q.gamma0 = 0.1;
  RaasParams f = finalize(q);
  CHECK(f.gamma_max == doctest::Approx(1 / (2 * 0.81)));
  auto [lo, hi] = alpha0_interval(f);
  CHECK(f.alpha0 > lo);
  CHECK(f.alpha0 < hi);
}

TEST_CASE("first trial is a gradient step and decreases an exact quadratic") {
  auto p = make_quadratic({40, 5.0, 0.0, 1});
  NoiseTape tape(1, p->d, NoiseConfig{}, 10);
  Oracle o(p, &tape);
  RaasParams prm = quad_params(*p, 0.1 / p->L);
  RaasState s = initial_state(prm, p->x0);
  TrialRecord r = trial(s, o, prm);
  CHECK(r.step_norm == 0.0);
  CHECK(r.accepted);
  CHECK(p->value(s.x) < p->value(p->x0));
  CHECK(s.x == p->x0 - r.gamma_hat * p->gradient(p->x0));
}

TEST_CASE("rejected trial is a null step") {
  auto p = make_quadratic({40, 5.0, 0.0, 1});
  NoiseTape tape(1, p->d, NoiseConfig{}, 10);
  Oracle o(p, &tape);
  RaasParams prm = quad_params(*p, 0.1 / p->L);
  prm.gamma_max = 1e6;
  RaasState s = initial_state(prm, p->x0);
  s.gamma_hat = 100.0;  // far beyond 2/L: condition (I) must fail
  const RaasState before = s;
  TrialRecord r = trial(s, o, prm);
  CHECK_FALSE(r.accepted);
  CHECK(s.x == before.x);
  CHECK(s.xbar == before.xbar);
  CHECK(s.x_prev == before.x_prev);
  CHECK(s.gamma_prev == before.gamma_prev);
  CHECK(s.alpha_prev == before.alpha_prev);
  CHECK(s.gamma_hat == doctest::Approx(prm.nu * 100.0));
  CHECK(r.Phi_next == r.Phi);
}

TEST_CASE("stagnation switch") {
  SwitchConfig sw;
  sw.enabled = true;
  RaasState s;
  s.theta = 0.3;
  s.vartheta = 0.1;
  s.gamma_hat = 1.0;
  switch_update(s, sw);
  CHECK(s.k_stag == 0);
  s.gamma_hat = 0.5;
  for (int k = 1; k <= 19; ++k) switch_update(s, sw);
  CHECK(s.vartheta == 0.1);
  switch_update(s, sw);  // 20th
  CHECK(s.vartheta == sw.vartheta_safe);
  for (int k = 21; k <= 49; ++k) switch_update(s, sw);
  CHECK(s.theta == 0.3);
  switch_update(s, sw);  // 50th
  CHECK(s.theta == 0.5);
  // Fires once: a later record does not undo or re-fire.
  s.gamma_hat = 10.0;
  switch_update(s, sw);
  CHECK(s.k_stag == 0);
  CHECK(s.vartheta == sw.vartheta_safe);

  RaasState g;
  g.vartheta = 0.1;
  for (int k = 1; k <= 100; ++k) {
    g.gamma_hat = k;
    switch_update(g, sw);
  }
  CHECK(g.k_stag == 0);
  CHECK_FALSE(g.s_vartheta);
}

TEST_CASE("run horizon, stopping and determinism") {
  auto p = make_quadratic({30, 1.0, 0.1, 2});
  NoiseTape tape(1, p->d, NoiseConfig{}, 1000);
  Oracle o(p, &tape);
  RaasParams prm = quad_params(*p, 0.5);
  RunTrace a = run(o, prm, 60);
  CHECK(a.records.size() == 60);
  CHECK_FALSE(a.t_eps.has_value());

  RunTrace b = run(o, prm, 1000, StopRule{1e-6, 0.0});
  REQUIRE(b.t_eps.has_value());
  const TrialRecord& last = b.records.back();
  CHECK(last.t == *b.t_eps);
  CHECK(std::min(last.gap_xp, last.gap_y) <= 1e-6);

  RunTrace c = run(o, prm, 60);
  REQUIRE(c.records.size() == a.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].gap == c.records[i].gap);
    CHECK(a.records[i].gamma_hat == c.records[i].gamma_hat);
  }
}

TEST_CASE("trial-level invariants on a noisy run") {
  auto p = make_quadratic({50, 5.0, 0.0, 3});
  NoiseConfig nc;
  nc.sigma_g = 0.1;
  nc.sigma_f = 1.0;
  NoiseTape tape(42, p->d, nc, 2500);
  Oracle o(p, &tape);
  RaasParams prm;
  prm.gamma0 = 0.15 / p->L;
  prm.tol_mode = ToleranceMode::Constant;
  prm.eps_f = 0.6;
  prm = finalize(prm);
  RunTrace tr = run(o, prm, 500);
  for (const TrialRecord& r : tr.records) {
    const double base = r.alpha_prev * r.alpha_prev / r.gamma_prev;
    const double res = r.alpha_hat * r.alpha_hat / r.gamma_hat -
                       (1 - r.alpha_hat) * base;
    CHECK(std::abs(res) <= 1e-12 * std::max(1.0, base));
    if (r.accepted) CHECK(r.gamma / r.gamma_prev <= 1 / prm.nu + 1e-12);
    CHECK(r.Phi >= r.gap_x);
    if (!r.accepted) CHECK(r.Phi_next == r.Phi);
  }
}
