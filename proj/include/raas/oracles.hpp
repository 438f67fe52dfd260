#pragma once

#include <array>
#include <cstdint>

#include "raas/problems.hpp"
#include "raas/rng.hpp"

namespace raas {

struct NoiseConfig {
  double sigma_g = 0.0;
  double k_g = 2.1;
  double bias_rel = 0.0;
  double sigma_f = 0.0;
  double k_f = 2.1;
};

// Throws ConfigError on invalid combinations.
void validate(const NoiseConfig& c);

// Position of a single scalar draw on a counter-addressed stream.
struct TapePosition {
  std::uint64_t seed = 0;
  std::uint64_t stream = kStreamScalar;
  std::uint64_t index = 0;
};

// Z / sqrt(V/k) with Z ~ N(0,1) and V ~ chi^2(k), both drawn from the
// generator keyed by the position.
double sample_student_t(const TapePosition& pos, double k);

// Fills out with i.i.d. Student-t(k) draws keyed by (seed, stream, t).
void student_t_row(std::uint64_t seed, std::uint64_t stream, std::uint64_t t,
                   double k, double* out, int n);

// BiasRel * sigma_g * sqrt(d k_g / (k_g - 2)) * u/|u|, u seeded standard normal.
Vec make_bias(int d, const NoiseConfig& c, std::uint64_t seed);

struct TapeEntry {
  Vec zeta;                   // unit-scale gradient perturbation, length d
  std::array<double, 3> e{};  // unit-scale function perturbations (x, y, x+)
};

// Seed-indexed perturbation stream. Entries are generated on demand and are a
// pure function of (seed, t, d, config); index t is 0-based.
class NoiseTape {
 public:
  NoiseTape(std::uint64_t seed, int d, const NoiseConfig& cfg, long length);

  TapeEntry entry(long t) const;
  Vec zeta(long t) const;
  std::array<double, 3> function_triple(long t) const;

  std::uint64_t seed() const { return seed_; }
  int dim() const { return d_; }
  long length() const { return length_; }
  const NoiseConfig& config() const { return cfg_; }
  const Vec& bias() const { return bias_; }

 private:
  void check(long t) const;

  std::uint64_t seed_;
  int d_;
  NoiseConfig cfg_;
  long length_;
  Vec bias_;
};

struct SfoResult {
  Vec G;
  Vec grad;  // exact gradient at the query point, kept for diagnostics
  double W = 0.0;
};

struct SzoResult {
  std::array<double, 3> f{};  // noisy values at (x, y, x+)
  std::array<double, 3> E{};  // realized errors f - phi
  double D = 0.0;             // max - min of E
};

// Biased heavy-tailed first- and zeroth-order oracles reading a shared tape.
class Oracle {
 public:
  Oracle(ProblemPtr problem, const NoiseTape* tape)
      : problem_(std::move(problem)), tape_(tape) {}

  // G = grad(y) + b + sigma_g * zeta_t.
  SfoResult sfo(const Vec& y, long t) const;
  // f(z) = phi(z) + sigma_f * e_t(z) for the triple (x, y, x+).
  SzoResult szo(const Vec& x, const Vec& y, const Vec& xp, long t) const;

  const Problem& problem() const { return *problem_; }
  const NoiseTape& tape() const { return *tape_; }

 private:
  ProblemPtr problem_;
  const NoiseTape* tape_;
};

}  // namespace raas
