/*!
 * This file is part of nncgp, a nearest neighbor co-kriging Gaussian
 * process library for multi-fidelity spatial regression.
 *
 * Licensed under the Apache License Version 2.0. See LICENSE file in the
 * project root for license information.
 */
#include "nncgp/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nncgp {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.push_back("");
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidInput(context + ": cannot parse number '" + s + "'");
  }
}

std::string quantile_column(double p) {
  // 0.025 -> q025, 0.975 -> q975, 0.5 -> q500
  const int permille = static_cast<int>(std::lround(p * 1000.0));
  char buf[8];
  std::snprintf(buf, sizeof(buf), "q%03d", permille);
  return buf;
}

}  // namespace

FidelityDataset read_data_csv(const std::string& path, int level) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open data file: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw InvalidInput("empty data file: " + path);
  const auto header = split(trim(line), ',');
  if (header.size() < 2 || trim(header.back()) != "value")
    throw InvalidInput(path + ": expected header 'x,y,value' or "
                       "'x1,...,xd,value'");
  const int d = static_cast<int>(header.size()) - 1;

  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto cells = split(t, ',');
    if (static_cast<int>(cells.size()) != d + 1)
      throw InvalidInput(path + ":" + std::to_string(lineno) +
                         ": expected " + std::to_string(d + 1) + " columns");
    std::vector<double> row(d + 1);
    for (int j = 0; j <= d; ++j)
      row[j] = parse_double(trim(cells[j]),
                            path + ":" + std::to_string(lineno));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInput(path + ": no data rows");

  FidelityDataset ds;
  ds.level = level;
  ds.locations.resize(rows.size(), d);
  ds.values.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < d; ++j) ds.locations(i, j) = rows[i][j];
    ds.values[i] = rows[i][d];
  }
  return ds;
}

void write_data_csv(const std::string& path, const FidelityDataset& data) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write data file: " + path);
  const int d = data.dim();
  if (d == 2) {
    out << "x,y,value\n";
  } else {
    for (int j = 0; j < d; ++j) out << "x" << (j + 1) << ",";
    out << "value\n";
  }
  out.precision(17);
  for (int i = 0; i < data.size(); ++i) {
    for (int j = 0; j < d; ++j) out << data.locations(i, j) << ",";
    out << data.values[i] << "\n";
  }
}

void write_prediction_csv(const std::string& path, const Matrix& targets,
                          const PredictionResult& result) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write prediction file: " + path);
  const int d = static_cast<int>(targets.cols());
  if (d == 2) {
    out << "x,y";
  } else {
    for (int j = 0; j < d; ++j) out << (j ? "," : "") << "x" << (j + 1);
  }
  out << ",mean,sd";
  for (double p : result.probs) out << "," << quantile_column(p);
  out << "\n";
  out.precision(17);
  for (int i = 0; i < targets.rows(); ++i) {
    for (int j = 0; j < d; ++j) out << (j ? "," : "") << targets(i, j);
    out << "," << result.mean[i] << "," << result.sd[i];
    for (int q = 0; q < result.quantiles.cols(); ++q)
      out << "," << result.quantiles(i, q);
    out << "\n";
  }
}

PredictionTable read_prediction_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open prediction file: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw InvalidInput("empty prediction file: " + path);
  auto header = split(trim(line), ',');
  for (auto& h : header) h = trim(h);
  int d = 0;
  while (d < static_cast<int>(header.size()) && header[d] != "mean") ++d;
  if (d == 0 || d >= static_cast<int>(header.size()))
    throw InvalidInput(path + ": missing 'mean' column");
  if (d + 1 >= static_cast<int>(header.size()) || header[d + 1] != "sd")
    throw InvalidInput(path + ": missing 'sd' column");

  PredictionTable table;
  for (std::size_t j = d + 2; j < header.size(); ++j) {
    if (header[j].size() != 4 || header[j][0] != 'q')
      throw InvalidInput(path + ": unexpected column '" + header[j] + "'");
    table.probs.push_back(std::stod(header[j].substr(1)) / 1000.0);
  }

  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto cells = split(t, ',');
    if (cells.size() != header.size())
      throw InvalidInput(path + ":" + std::to_string(lineno) +
                         ": column count mismatch");
    std::vector<double> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j)
      row[j] = parse_double(trim(cells[j]),
                            path + ":" + std::to_string(lineno));
    rows.push_back(std::move(row));
  }
  const int n = static_cast<int>(rows.size());
  const int nq = static_cast<int>(table.probs.size());
  table.targets.resize(n, d);
  table.mean.resize(n);
  table.sd.resize(n);
  table.quantiles.resize(n, nq);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) table.targets(i, j) = rows[i][j];
    table.mean[i] = rows[i][d];
    table.sd[i] = rows[i][d + 1];
    for (int q = 0; q < nq; ++q) table.quantiles(i, q) = rows[i][d + 2 + q];
  }
  return table;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
  Config cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidInput("config line " + std::to_string(lineno) +
                         ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw InvalidInput("config line " + std::to_string(lineno) +
                         ": empty key");
    cfg.kv_[key] = value;
  }
  return cfg;
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string Config::get_string(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end())
    throw InvalidInput("config: missing required key '" + key + "'");
  return it->second;
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
  return parse_double(get_string(key), "config key '" + key + "'");
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long Config::get_long(const std::string& key) const {
  const double v = get_double(key);
  const long l = static_cast<long>(v);
  if (static_cast<double>(l) != v)
    throw InvalidInput("config key '" + key + "': expected an integer");
  return l;
}

long Config::get_long(const std::string& key, long fallback) const {
  return has(key) ? get_long(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get_string(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidInput("config key '" + key + "': expected a boolean");
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  const auto cells = split(get_string(key), ',');
  std::vector<double> out;
  for (const auto& c : cells)
    out.push_back(parse_double(trim(c), "config key '" + key + "'"));
  return out;
}

std::string Config::digest() const {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  auto feed = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001B3ULL;
    }
  };
  for (const auto& [k, v] : kv_) {
    feed(k);
    feed("=");
    feed(v);
    feed("\n");
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

namespace {

void write_level_trace_csv(const std::string& path, const ChainTrace& trace,
                           int t) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write trace file: " + path);
  out << "iter";
  for (int j = 0; j < trace.beta[t].cols(); ++j) out << ",beta_" << j;
  for (int j = 0; j < trace.gamma[t].cols(); ++j) out << ",gamma_" << j;
  out << ",sigma2";
  for (int j = 0; j < trace.phi[t].cols(); ++j) out << ",phi_" << j;
  out << ",tau2\n";
  out.precision(17);
  for (int r = 0; r < trace.n_retained; ++r) {
    out << r;
    for (int j = 0; j < trace.beta[t].cols(); ++j)
      out << "," << trace.beta[t](r, j);
    for (int j = 0; j < trace.gamma[t].cols(); ++j)
      out << "," << trace.gamma[t](r, j);
    out << "," << trace.sigma2[t][r];
    for (int j = 0; j < trace.phi[t].cols(); ++j)
      out << "," << trace.phi[t](r, j);
    out << "," << trace.tau2[t][r] << "\n";
  }
}

Matrix read_matrix_bin(std::ifstream& in, const std::string& path) {
  std::int64_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
  in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
  if (!in || rows < 0 || cols < 0)
    throw InvalidInput("corrupt latent snapshot file: " + path);
  Matrix m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * rows * cols));
  if (!in) throw InvalidInput("corrupt latent snapshot file: " + path);
  return m;
}

void write_matrix_bin(std::ofstream& out, const Matrix& m) {
  const std::int64_t rows = m.rows(), cols = m.cols();
  out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
  out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * rows * cols));
}

}  // namespace

void write_trace(const std::string& dir, const ChainTrace& trace,
                 const Workspace& ws) {
  std::filesystem::create_directories(dir);
  for (int t = 0; t < ws.T; ++t) {
    write_level_trace_csv(dir + "/trace_level" + std::to_string(t + 1) +
                          ".csv", trace, t);
    if (trace.w_snapshots[t].rows() == trace.n_retained) {
      std::ofstream out(dir + "/latents_level" + std::to_string(t + 1) +
                        ".bin", std::ios::binary);
      if (!out) throw InvalidInput("cannot write latent snapshots in " + dir);
      const char magic[8] = {'N', 'N', 'C', 'G', 'P', 'W', '0', '1'};
      out.write(magic, sizeof(magic));
      write_matrix_bin(out, trace.w_snapshots[t]);
    }
  }
}

ChainTrace read_trace(const std::string& dir, const Workspace& ws) {
  ChainTrace trace;
  trace.beta.resize(ws.T);
  trace.gamma.resize(ws.T);
  trace.sigma2.resize(ws.T);
  trace.tau2.resize(ws.T);
  trace.phi.resize(ws.T);
  trace.w_snapshots.resize(ws.T);
  for (int t = 0; t < ws.T; ++t) {
    const std::string path = dir + "/trace_level" + std::to_string(t + 1) +
                             ".csv";
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open trace file: " + path);
    std::string line;
    std::getline(in, line);
    const auto header = split(trim(line), ',');
    int n_beta = 0, n_gamma = 0, n_phi = 0;
    for (const auto& h : header) {
      if (h.rfind("beta_", 0) == 0) ++n_beta;
      if (h.rfind("gamma_", 0) == 0) ++n_gamma;
      if (h.rfind("phi_", 0) == 0) ++n_phi;
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
      const std::string s = trim(line);
      if (s.empty()) continue;
      const auto cells = split(s, ',');
      std::vector<double> row(cells.size());
      for (std::size_t j = 0; j < cells.size(); ++j)
        row[j] = parse_double(trim(cells[j]), path);
      rows.push_back(std::move(row));
    }
    const int n = static_cast<int>(rows.size());
    if (t == 0) trace.n_retained = n;
    if (n != trace.n_retained)
      throw InvalidInput("trace files disagree on retained draws in " + dir);
    trace.beta[t].resize(n, n_beta);
    trace.gamma[t].resize(n, n_gamma);
    trace.sigma2[t].resize(n);
    trace.tau2[t].resize(n);
    trace.phi[t].resize(n, n_phi);
    for (int r = 0; r < n; ++r) {
      int c = 1;
      for (int j = 0; j < n_beta; ++j) trace.beta[t](r, j) = rows[r][c++];
      for (int j = 0; j < n_gamma; ++j) trace.gamma[t](r, j) = rows[r][c++];
      trace.sigma2[t][r] = rows[r][c++];
      for (int j = 0; j < n_phi; ++j) trace.phi[t](r, j) = rows[r][c++];
      trace.tau2[t][r] = rows[r][c++];
    }
    const std::string wpath = dir + "/latents_level" + std::to_string(t + 1) +
                              ".bin";
    std::ifstream win(wpath, std::ios::binary);
    if (win) {
      char magic[8];
      win.read(magic, sizeof(magic));
      if (std::string(magic, 8) != "NNCGPW01")
        throw InvalidInput("corrupt latent snapshot file: " + wpath);
      trace.w_snapshots[t] = read_matrix_bin(win, wpath);
    }
  }
  return trace;
}

void write_manifest(const std::string& dir, const std::string& model,
                    std::uint64_t seed, const std::string& config_digest,
                    const ChainTrace& trace) {
  nlohmann::json j;
  j["model"] = model;
  j["seed"] = seed;
  j["config_digest"] = config_digest;
  j["n_retained"] = trace.n_retained;
  j["phi_accept_rate"] = trace.phi_accept_rate;
  j["mh_step_final"] = trace.mh_step_final;
  std::ofstream out(dir + "/manifest.json");
  if (!out) throw InvalidInput("cannot write manifest in " + dir);
  out << j.dump(2) << "\n";
}

std::string eval_report_json(const EvalReport& report) {
  nlohmann::json j;
  j["rmspe"] = report.rmspe;
  j["nsme"] = report.nsme;
  j["cvg95"] = report.cvg95;
  j["alci95"] = report.alci95;
  if (report.has_dic) {
    j["pd"] = report.pd;
    j["dic"] = report.dic;
  }
  j["n_test"] = report.n_test;
  return j.dump(2);
}

}  // namespace nncgp
