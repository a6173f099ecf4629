/*!
 * This file is part of nncgp, a nearest neighbor co-kriging Gaussian
 * process library for multi-fidelity spatial regression.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#pragma once

#include <map>
#include <optional>
#include <string>

#include "nncgp/metrics.hpp"
#include "nncgp/predict.hpp"

namespace nncgp {

/// Reads a data CSV with header `x,y,value` (or `x1,...,xd,value`).
FidelityDataset read_data_csv(const std::string& path, int level = 1);
void write_data_csv(const std::string& path, const FidelityDataset& data);

/// Prediction CSV: `x,y,mean,sd,q025,q975` (one q### column per requested
/// probability), one row per target.
void write_prediction_csv(const std::string& path, const Matrix& targets,
                          const PredictionResult& result);
/// Reads back the coordinate and mean/sd/quantile columns.
struct PredictionTable {
  Matrix targets;
  Vector mean, sd;
  Matrix quantiles;
  std::vector<double> probs;
};
PredictionTable read_prediction_csv(const std::string& path);

/// Flat dotted-key configuration file: `key = value` lines, `#` comments.
class Config {
 public:
  static Config load(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key) const;
  long get_long(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }
  /// FNV-1a hash of the canonicalized key-value pairs.
  std::string digest() const;

 private:
  std::map<std::string, std::string> kv_;
};

/// Serialized chain output: per-level trace CSVs, latent snapshots and a
/// manifest. `dir` is created when missing.
void write_trace(const std::string& dir, const ChainTrace& trace,
                 const Workspace& ws);
ChainTrace read_trace(const std::string& dir, const Workspace& ws);

void write_manifest(const std::string& dir, const std::string& model,
                    std::uint64_t seed, const std::string& config_digest,
                    const ChainTrace& trace);

std::string eval_report_json(const EvalReport& report);

}  // namespace nncgp
