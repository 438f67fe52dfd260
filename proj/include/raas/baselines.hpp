#pragma once

#include <optional>
#include <string>

#include "raas/raas.hpp"

namespace raas {

enum class BaselineKind { Sgd, ConsNag, AccClip };

struct BaselineParams {
  BaselineKind kind = BaselineKind::Sgd;
  double eta = 0.0;
  double beta = 0.9;
  double tau_clip = 1.0;
};

Vec sgd_step(const Vec& x, const Vec& G, double eta);
// y = x + beta (x - x_prev); the caller evaluates G at y.
Vec nag_extrapolate(const Vec& x, const Vec& x_prev, double beta);
Vec nag_step(const Vec& x, const Vec& x_prev, const Vec& G_at_y, double eta,
             double beta);
// G * min{1, tau/|G|}.
Vec clip(const Vec& G, double tau);

// SFO-only baselines: one tape entry per iteration, every step accepted.
RunTrace run_baseline(const Oracle& oracle, const BaselineParams& b, long T,
                      std::optional<StopRule> stop = std::nullopt);

// Momentum-free adaptive step search: vartheta = 1, condition (II) off.
RaasParams sass_params(RaasParams base);
// Accelerated adaptive search: (theta, vartheta) = (1/2, 0), condition (II) off.
RaasParams adp_nag_params(RaasParams base);

}  // namespace raas
