/*!
 * This file is part of nncgp, a nearest neighbor co-kriging Gaussian
 * process library for multi-fidelity spatial regression.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#pragma once

#include "nncgp/sampler.hpp"

namespace nncgp {

struct PredictionRequest {
  Matrix targets;  // per row, a location
  int level = 1;   // 1-based fidelity level of the requested output
  std::vector<double> quantiles = {0.025, 0.975};

  void validate(int T) const;
};

struct PredictionResult {
  Vector mean;
  Vector sd;
  Matrix quantiles;  // n_targets x probs.size()
  std::vector<double> probs;
  int n_draws = 0;
};

/// Posterior-predictive summaries of z_level at each target.
///
/// Each retained draw composes the autoregressive chain at the target:
/// for t' = 1..level, w_{t'}(s) is drawn from its NNGP conditional given
/// the m nearest reference sites of S̃_{t'} (unrestricted by ordering),
/// then y_{t'}(s) = ζ_{t'-1}(s) y_{t'-1}(s) + h_{t'}(s)·β_{t'} + w_{t'}(s)
/// and finally z ~ N(y_level(s), τ²). Targets that coincide exactly with a
/// reference site reuse the stored latent draw at that site.
PredictionResult predict(const Workspace& ws, const ChainTrace& trace,
                         const PredictionRequest& request,
                         std::uint64_t seed = 0x9E3779B9u);

struct GridSpec {
  Vector lo, hi;    // bounding box corners
  Vector cell;      // cell edge per coordinate

  /// Cell centers in row-major order (last coordinate slowest).
  Matrix centers() const;
};

/// Gap-filling over a grid: enumerates cell centers row-major and
/// delegates to predict().
PredictionResult predict_grid(const Workspace& ws, const ChainTrace& trace,
                              const GridSpec& grid, int level,
                              const std::vector<double>& quantiles =
                                  {0.025, 0.975},
                              std::uint64_t seed = 0x9E3779B9u);

/// Empirical quantile (linear interpolation between order statistics).
double empirical_quantile(std::vector<double> values, double p);

}  // namespace nncgp
