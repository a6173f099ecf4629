/*!
 * This file is part of nncgp, a nearest neighbor co-kriging Gaussian
 * process library for multi-fidelity spatial regression.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#pragma once

#include <cstdint>

#include "nncgp/types.hpp"

namespace nncgp {

/// Counter-based pseudo-random stream built on Philox2x64-10.
///
/// Each (seed, stream) pair addresses an independent substream, so
/// per-level or per-target draws stay reproducible no matter how work is
/// scheduled across threads. Draws advance a 64-bit block counter; there
/// is no hidden shared state.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Uniform on (lo, hi).
  double uniform(double lo, double hi);

  /// Standard normal via Box-Muller (second variate cached).
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Gamma(shape, rate 1) via Marsaglia-Tsang squeeze.
  double gamma(double shape);
  /// Inverse-gamma(shape, rate): density ∝ x^{-shape-1} exp(-rate/x).
  double inverse_gamma(double shape, double rate);

  /// Draw from N(mean, cov) using a Cholesky factor of cov.
  Vector mvn(const Vector& mean, const Matrix& cov);

 private:
  void refill();

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::uint64_t buf_[2] = {0, 0};
  int buf_pos_ = 2;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

/// Stateless 64-bit mix, used to derive substream keys.
std::uint64_t mix64(std::uint64_t x);

}  // namespace nncgp
