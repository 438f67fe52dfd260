#include "raas/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace raas {

namespace {

double draw_t(SplitMix64& g, double k) {
  std::normal_distribution<double> z;
  std::chi_squared_distribution<double> v(k);
  double num = z(g);
  return num / std::sqrt(v(g) / k);
}

}  // namespace

void validate(const NoiseConfig& c) {
  if (c.sigma_g < 0 || c.sigma_f < 0)
    throw ConfigError("noise: sigma_g and sigma_f must be >= 0");
  if (c.bias_rel < 0) throw ConfigError("noise: bias_rel must be >= 0");
  if (!(c.k_g > 1) || !(c.k_f > 1))
    throw ConfigError("noise: degrees of freedom must be > 1");
  if (c.bias_rel > 0 && !(c.k_g > 2))
    throw ConfigError("noise: bias_rel > 0 requires k_g > 2");
}

double sample_student_t(const TapePosition& pos, double k) {
  SplitMix64 g(counter_key(pos.seed, pos.stream, pos.index));
  return draw_t(g, k);
}

void student_t_row(std::uint64_t seed, std::uint64_t stream, std::uint64_t t,
                   double k, double* out, int n) {
  SplitMix64 g(counter_key(seed, stream, t));
  for (int i = 0; i < n; ++i) out[i] = draw_t(g, k);
}

Vec make_bias(int d, const NoiseConfig& c, std::uint64_t seed) {
  if (c.bias_rel < 0) throw ConfigError("noise: bias_rel must be >= 0");
  if (c.bias_rel == 0.0 || c.sigma_g == 0.0) return Vec::Zero(d);
  if (!(c.k_g > 2)) throw ConfigError("noise: bias_rel > 0 requires k_g > 2");
  SplitMix64 g(counter_key(seed, kStreamBias, 0));
  std::normal_distribution<double> n01;
  Vec u(d);
  for (int i = 0; i < d; ++i) u(i) = n01(g);
  const double norm = c.bias_rel * c.sigma_g * std::sqrt(d * c.k_g / (c.k_g - 2.0));
  return norm * u / u.norm();
}

NoiseTape::NoiseTape(std::uint64_t seed, int d, const NoiseConfig& cfg,
                     long length)
    : seed_(seed), d_(d), cfg_(cfg), length_(length) {
  validate(cfg);
  bias_ = make_bias(d, cfg, seed);
}

void NoiseTape::check(long t) const {
  if (t < 0 || t >= length_)
    throw TapeExhausted("noise tape exhausted at index " + std::to_string(t) +
                        " (length " + std::to_string(length_) + ")");
}

Vec NoiseTape::zeta(long t) const {
  check(t);
  Vec z(d_);
  student_t_row(seed_, kStreamGradient, std::uint64_t(t), cfg_.k_g, z.data(), d_);
  return z;
}

std::array<double, 3> NoiseTape::function_triple(long t) const {
  check(t);
  std::array<double, 3> e{};
  student_t_row(seed_, kStreamFunction, std::uint64_t(t), cfg_.k_f, e.data(), 3);
  return e;
}

TapeEntry NoiseTape::entry(long t) const {
  return TapeEntry{zeta(t), function_triple(t)};
}

SfoResult Oracle::sfo(const Vec& y, long t) const {
  const NoiseConfig& c = tape_->config();
  SfoResult r;
  r.grad = problem_->gradient(y);
  Vec err = tape_->bias();
  if (c.sigma_g != 0.0) {
    err += c.sigma_g * tape_->zeta(t);
  } else if (t < 0 || t >= tape_->length()) {
    tape_->zeta(t);  // range check only
  }
  r.G = r.grad + err;
  r.W = err.norm();
  return r;
}

SzoResult Oracle::szo(const Vec& x, const Vec& y, const Vec& xp, long t) const {
  const NoiseConfig& c = tape_->config();
  SzoResult r;
  std::array<double, 3> e{};
  if (c.sigma_f != 0.0) {
    e = tape_->function_triple(t);
  } else if (t < 0 || t >= tape_->length()) {
    tape_->function_triple(t);
  }
  const Vec* pts[3] = {&x, &y, &xp};
  for (int i = 0; i < 3; ++i) {
    r.E[i] = c.sigma_f * e[i];
    r.f[i] = problem_->value(*pts[i]) + r.E[i];
  }
  auto [mn, mx] = std::minmax_element(r.E.begin(), r.E.end());
  r.D = *mx - *mn;
  return r;
}

}  // namespace raas
