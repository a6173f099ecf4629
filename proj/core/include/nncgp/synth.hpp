/*!
 * This file is part of nncgp, a nearest neighbor co-kriging Gaussian
 * process library for multi-fidelity spatial regression.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#pragma once

#include "nncgp/model.hpp"

namespace nncgp {

struct Box {
  Vector lo, hi;
  bool contains(const Eigen::Ref<const Vector>& s) const;
};

struct SynthConfig {
  int T = 2;
  std::vector<int> n;               // per level
  std::vector<LevelParams> truth;   // per level
  BasisConfig basis;
  Box bbox;
  std::vector<Box> holdouts;        // carved out of holdout_level
  int holdout_level = 2;            // 1-based
  std::uint64_t seed = 1;
  int dense_cap = 4000;             // per-field dense simulation limit
  bool sequential = false;          // conditional generation beyond the cap
  int sequential_neighbors = 20;

  void validate() const;
};

struct SynthOutput {
  std::vector<FidelityDataset> train;
  FidelityDataset test;
  bool approximate = false;  // sequential field generation was used
};

/// Forward-simulates the multi-fidelity model: uniform locations on the
/// bounding box with cross-level disjointness, latent fields from their
/// GPs (dense Cholesky up to the cap, sequential exact-conditioning with
/// truncated history beyond it), observations composed through the
/// autoregression with nugget noise. Points of the holdout level falling
/// inside a holdout box move to the test dataset.
SynthOutput simulate(const SynthConfig& config);

}  // namespace nncgp
