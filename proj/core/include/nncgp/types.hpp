/*!
 * This file is part of nncgp, a nearest neighbor co-kriging Gaussian
 * process library for multi-fidelity spatial regression.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nncgp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A fidelity level's observations: point coordinates (rows of
/// `locations`) and the observed response at each point.
struct FidelityDataset {
  int level = 1;      // 1-based fidelity index, 1 = least accurate
  Matrix locations;   // n_t x d
  Vector values;      // n_t

  int size() const { return static_cast<int>(locations.rows()); }
  int dim() const { return static_cast<int>(locations.cols()); }
};

/// Thrown on violated preconditions and malformed inputs.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical step fails beyond recovery (e.g. a covariance
/// factorization that stays indefinite after the jitter retry).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nncgp
