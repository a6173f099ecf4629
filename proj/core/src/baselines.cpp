/*!
 * This file is part of nncgp, a nearest neighbor co-kriging Gaussian
 * process library for multi-fidelity spatial regression.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "nncgp/baselines.hpp"

namespace nncgp {

BaselineFit fit_single_level(const FidelityDataset& data,
                             const LevelPriors& priors,
                             const SamplerConfig& config, int m,
                             BasisKind trend) {
  FidelityDataset ds = data;
  ds.level = 1;
  BaselineFit fit;
  fit.ws = build_workspace({std::move(ds)}, m,
                           BasisConfig::uniform(1, trend,
                                                BasisKind::kConstant));
  fit.trace = run_chain(fit.ws, {priors}, config);
  return fit;
}

BaselineFit fit_combined(const std::vector<FidelityDataset>& datasets,
                         const LevelPriors& priors,
                         const SamplerConfig& config, int m,
                         BasisKind trend) {
  if (datasets.empty()) throw InvalidInput("fit_combined: no datasets");
  const int d = datasets[0].dim();
  int total = 0;
  for (const auto& ds : datasets) {
    if (ds.dim() != d)
      throw InvalidInput("fit_combined: coordinate dimension mismatch");
    total += ds.size();
  }
  FidelityDataset merged;
  merged.level = 1;
  merged.locations.resize(total, d);
  merged.values.resize(total);
  int row = 0;
  for (const auto& ds : datasets) {
    merged.locations.middleRows(row, ds.size()) = ds.locations;
    merged.values.segment(row, ds.size()) = ds.values;
    row += ds.size();
  }
  BaselineFit fit;
  fit.ws = build_workspace({std::move(merged)}, m,
                           BasisConfig::uniform(1, trend,
                                                BasisKind::kConstant),
                           /*jitter_duplicates=*/true);
  fit.trace = run_chain(fit.ws, {priors}, config);
  return fit;
}

}  // namespace nncgp
