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

/// Single-level comparator: the one-level special case of the sampler on
/// the highest-fidelity dataset (no scale discrepancy, no augmentation).
/// Returns the workspace alongside the trace since prediction needs it.
struct BaselineFit {
  Workspace ws;
  ChainTrace trace;
};

BaselineFit fit_single_level(const FidelityDataset& data,
                             const LevelPriors& priors,
                             const SamplerConfig& config, int m,
                             BasisKind trend = BasisKind::kConstant);

/// Combined comparator: concatenates every level into one level-1 dataset
/// (values unmodified, level labels dropped) and fits the one-level model.
/// Exact cross-level duplicates are resolved by the deterministic jitter.
BaselineFit fit_combined(const std::vector<FidelityDataset>& datasets,
                         const LevelPriors& priors,
                         const SamplerConfig& config, int m,
                         BasisKind trend = BasisKind::kConstant);

}  // namespace nncgp
