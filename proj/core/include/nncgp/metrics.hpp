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

struct EvalReport {
  double rmspe = 0.0;
  double nsme = 0.0;
  double cvg95 = 0.0;
  double alci95 = 0.0;
  bool has_dic = false;
  double pd = 0.0;
  double dic = 0.0;
  int n_test = 0;
};

/// Root mean square prediction error.
double rmspe(const Vector& pred, const Vector& obs);

/// Nash-Sutcliffe model efficiency: 1 - SSE/SST. Errors on constant obs.
double nsme(const Vector& pred, const Vector& obs);

/// Empirical coverage and average length of prediction intervals.
std::pair<double, double> interval_metrics(const Vector& lower,
                                           const Vector& upper,
                                           const Vector& obs);

/// Deviance information criterion from a fitted trace with latent
/// snapshots. The deviance D(θ) = -2 log p(z | θ, w) uses the complete
/// factorized normal likelihood (2π terms included); the plug-in deviance
/// evaluates posterior means of the parameters and the latent fields.
/// Returns (pd, dic).
std::pair<double, double> dic(const ChainTrace& trace, const Workspace& ws);

}  // namespace nncgp
