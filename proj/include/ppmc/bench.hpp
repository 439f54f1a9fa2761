// Copyright 2026 The ppmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PPMC_BENCH_HPP_
#define PPMC_BENCH_HPP_

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppmc/matrix.hpp"
#include "ppmc/solver.hpp"
#include "ppmc/trajectory.hpp"

namespace ppmc {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct BenchRow {
  Index rows = 0, cols = 0;
  int iters = 0;
  std::string algo;
  double wall_time = 0.0;  // solver iterations only, seconds
  double rse_value = 0.0;
};

struct SweepRow {
  double alpha = 0.0;
  double median_rse = 0.0, q25 = 0.0, q75 = 0.0;
  int seeds = 0;
};

/// Synthetic speed/accuracy grid: rank = ceil(0.01*min(S,T)), loss rate 0.5,
/// exactly K iterations per run (stopping threshold disabled for parity).
/// Timing covers solver iterations only.
inline std::vector<BenchRow> bench_synthetic(
    const std::vector<std::pair<Index, Index>>& sizes,
    const std::vector<int>& iters_list, const std::vector<std::string>& algos,
    Seed seed) {
  std::vector<BenchRow> rows;
  for (const auto& [s, t] : sizes) {
    const Index rank = synthetic_rank(s, t);
    const Matrix truth = gen_low_rank(s, t, rank, seed);
    const ObservationMask mask =
        ObservationMask::bernoulli(s, t, 0.5, seed + 1);
    const Matrix m_enc = hadamard(truth, mask);
    for (int iters : iters_list) {
      for (const std::string& algo : algos) {
        SolverConfig cfg;
        cfg.rank = rank;
        cfg.max_iters = iters;
        cfg.eps = 0.0;  // fixed iteration count
        const CompletionResult res = algo == "alt-min"
                                         ? alt_min(m_enc, mask, cfg)
                                         : pplnm_qr(m_enc, mask, cfg);
        rows.push_back(BenchRow{s, t, iters, algo, res.wall_time,
                                rse(res.recovered, truth)});
      }
    }
  }
  return rows;
}

namespace detail {
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}
}  // namespace detail

/// Recovery error versus loss rate on synthetic smooth tracks: for each
/// alpha, `seeds_per_alpha` independent track sets are masked and completed;
/// the row records the median and quartiles of the aggregate RSE.
inline std::vector<SweepRow> loss_sweep(std::size_t grid_len,
                                        std::size_t users, Index rank,
                                        const std::vector<double>& alphas,
                                        int seeds_per_alpha,
                                        const SolverConfig& solver_cfg,
                                        Seed seed) {
  std::vector<SweepRow> rows;
  for (double alpha : alphas) {
    if (!(alpha >= 0.0 && alpha < 1.0))
      throw std::domain_error("loss_sweep: alpha must lie in [0,1)");
    std::vector<double> rses;
    for (int sidx = 0; sidx < seeds_per_alpha; ++sidx) {
      const Seed run_seed = seed + static_cast<Seed>(sidx);
      TrackMatrixPair truth =
          synthetic_smooth_tracks(grid_len, users, rank, run_seed);
      const ObservationMask loss = ObservationMask::bernoulli(
          static_cast<Index>(grid_len), static_cast<Index>(users), alpha,
          run_seed + 1000003);
      SolverConfig cfg = solver_cfg;
      cfg.rank = rank;
      const CompletionResult lat =
          pplnm_qr(hadamard(truth.lat_mat, loss), loss, cfg);
      const CompletionResult lon =
          pplnm_qr(hadamard(truth.lon_mat, loss), loss, cfg);
      TrackMatrixPair rec = truth;
      rec.lat_mat = lat.recovered;
      rec.lon_mat = lon.recovered;
      rses.push_back(track_rse(rec, truth).aggregate);
    }
    std::sort(rses.begin(), rses.end());
    rows.push_back(SweepRow{alpha, detail::quantile_sorted(rses, 0.5),
                            detail::quantile_sorted(rses, 0.25),
                            detail::quantile_sorted(rses, 0.75),
                            seeds_per_alpha});
  }
  return rows;
}

struct ReportMeta {
  Seed seed = 0;
  std::string config;
};

inline void emit_report(const std::vector<BenchRow>& rows,
                        const std::string& format, const std::string& path,
                        const ReportMeta& meta = {}) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  if (format == "json") {
    nlohmann::json j;
    j["version"] = kArtifactVersion;
    j["seed"] = meta.seed;
    j["config"] = meta.config;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows)
      j["rows"].push_back({{"rows", r.rows},
                           {"cols", r.cols},
                           {"iters", r.iters},
                           {"algo", r.algo},
                           {"wall_time_s", r.wall_time},
                           {"rse", r.rse_value}});
    f << j.dump(2) << '\n';
  } else if (format == "csv") {
    f << "# version=" << kArtifactVersion << " seed=" << meta.seed
      << (meta.config.empty() ? "" : " config=" + meta.config) << '\n';
    f << "rows,cols,iters,algo,wall_time_s,rse\n";
    char buf[64];
    for (const auto& r : rows) {
      f << r.rows << ',' << r.cols << ',' << r.iters << ',' << r.algo << ',';
      std::snprintf(buf, sizeof(buf), "%.17g,", r.wall_time);
      f << buf;
      std::snprintf(buf, sizeof(buf), "%.17g", r.rse_value);
      f << buf << '\n';
    }
  } else {
    throw std::invalid_argument("emit_report: unknown format " + format);
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

inline void emit_sweep(const std::vector<SweepRow>& rows,
                       const std::string& path, const ReportMeta& meta = {}) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "# version=" << kArtifactVersion << " seed=" << meta.seed
    << (meta.config.empty() ? "" : " config=" + meta.config) << '\n';
  f << "alpha,median_rse,q25,q75,seeds\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,", r.alpha,
                  r.median_rse, r.q25, r.q75);
    f << buf << r.seeds << '\n';
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

inline std::vector<BenchRow> parse_report_csv(std::istream& is) {
  std::vector<BenchRow> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("rows,", 0) == 0)
      continue;
    BenchRow r;
    std::istringstream ls(line);
    std::string field;
    std::getline(ls, field, ',');
    r.rows = std::stoll(field);
    std::getline(ls, field, ',');
    r.cols = std::stoll(field);
    std::getline(ls, field, ',');
    r.iters = std::stoi(field);
    std::getline(ls, r.algo, ',');
    std::getline(ls, field, ',');
    r.wall_time = std::stod(field);
    std::getline(ls, field, ',');
    r.rse_value = std::stod(field);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace ppmc

#endif  // PPMC_BENCH_HPP_
