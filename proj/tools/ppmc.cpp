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
//
// ppmc: privacy-preserving matrix completion command line.
// Exit codes: 0 success, 2 usage error, 3 numeric/runtime failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ppmc/bench.hpp"
#include "ppmc/crypto.hpp"
#include "ppmc/io.hpp"
#include "ppmc/matrix.hpp"
#include "ppmc/session.hpp"
#include "ppmc/solver.hpp"
#include "ppmc/trajectory.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<ppmc::PrivateKeys> load_user_keys(const std::string& dir,
                                              ppmc::Index users) {
  std::vector<ppmc::PrivateKeys> keys;
  for (ppmc::Index k = 0; k < users; ++k) {
    const fs::path path =
        fs::path(dir) / ("user_" + std::to_string(k) + ".keys.json");
    keys.push_back(ppmc::load_keys(path.string()));
  }
  return keys;
}

void write_solver_report(const std::string& path,
                         const ppmc::CompletionResult& res) {
  nlohmann::json j;
  j["iterations_run"] = res.iterations_run;
  j["wall_time_s"] = res.wall_time;
  j["step_history"] = res.step_history;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << j.dump(2) << '\n';
}

int cmd_keygen(ppmc::Index users, ppmc::Index public_rank, ppmc::Index rows,
               double psi_min, ppmc::Seed seed, const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::mt19937_64 seeder(seed);
  const ppmc::PublicMatrix pub =
      ppmc::gen_public_matrix(rows, public_rank, seeder());
  ppmc::write_csv((fs::path(out_dir) / "public_matrix.csv").string(), pub.p);
  for (ppmc::Index k = 0; k < users; ++k) {
    ppmc::PrivateKeys keys =
        ppmc::gen_private_keys(public_rank, psi_min, seeder());
    keys.user_id = "user_" + std::to_string(k);
    ppmc::save_keys(
        (fs::path(out_dir) / (keys.user_id + ".keys.json")).string(), keys);
  }
  return 0;
}

int cmd_encrypt(const std::string& in, const std::string& mask_path,
                const std::string& keys_dir, const std::string& out) {
  const ppmc::Matrix data = ppmc::read_csv_file(in);
  const ppmc::ObservationMask mask = ppmc::read_mask_csv(mask_path);
  const ppmc::PublicMatrix pub{ppmc::read_csv_file(
      (fs::path(keys_dir) / "public_matrix.csv").string())};
  const auto keys = load_user_keys(keys_dir, data.cols());
  ppmc::Matrix enc(data.rows(), data.cols());
  for (ppmc::Index k = 0; k < data.cols(); ++k)
    enc.col(k) = ppmc::encrypt_column(data.col(k), mask.bits().col(k), pub,
                                      keys[static_cast<std::size_t>(k)])
                     .data;
  ppmc::write_csv(out, enc);
  return 0;
}

int cmd_complete(const std::string& in, const std::string& mask_path,
                 const ppmc::SolverConfig& cfg, const std::string& algo,
                 const std::string& out, const std::string& report) {
  const ppmc::Matrix enc = ppmc::read_csv_file(in);
  const ppmc::ObservationMask mask = ppmc::read_mask_csv(mask_path);
  const ppmc::CompletionResult res = algo == "alt-min"
                                         ? ppmc::alt_min(enc, mask, cfg)
                                         : ppmc::pplnm_qr(enc, mask, cfg);
  ppmc::write_csv(out, res.recovered);
  if (!report.empty()) write_solver_report(report, res);
  return 0;
}

int cmd_decrypt(const std::string& in, const std::string& keys_dir,
                const std::string& out) {
  const ppmc::Matrix rec = ppmc::read_csv_file(in);
  const ppmc::PublicMatrix pub{ppmc::read_csv_file(
      (fs::path(keys_dir) / "public_matrix.csv").string())};
  const auto keys = load_user_keys(keys_dir, rec.cols());
  ppmc::Matrix dec(rec.rows(), rec.cols());
  for (ppmc::Index k = 0; k < rec.cols(); ++k)
    dec.col(k) = ppmc::decrypt_column(rec.col(k), pub,
                                      keys[static_cast<std::size_t>(k)]);
  ppmc::write_csv(out, dec);
  return 0;
}

int cmd_session_rows(ppmc::SessionConfig cfg, ppmc::Index rows,
                     const std::string& report_path,
                     const std::string& uploads_path) {
  const ppmc::Matrix truth =
      ppmc::gen_low_rank(rows, cfg.user_count, cfg.data_rank, cfg.seed + 17);
  ppmc::SessionArtifacts artifacts;
  const ppmc::SessionReport rep = ppmc::run_session(truth, cfg, &artifacts);
  if (!uploads_path.empty()) {
    std::vector<ppmc::UploadRecord> records;
    for (ppmc::Index k = 0; k < cfg.user_count; ++k) {
      ppmc::UploadRecord rec;
      rec.user_id = artifacts.keys[static_cast<std::size_t>(k)].user_id;
      for (ppmc::Index i = 0; i < artifacts.encrypted.rows(); ++i) {
        rec.column.push_back(artifacts.encrypted(i, k));
        rec.observed.push_back(artifacts.mask.bits()(i, k) != 0.0 ? 1 : 0);
      }
      records.push_back(std::move(rec));
    }
    std::ofstream f(uploads_path);
    ppmc::write_upload_records(f, records);
  }
  nlohmann::json j;
  j["version"] = ppmc::kArtifactVersion;
  j["seed"] = cfg.seed;
  j["per_user_rse"] = rep.per_user_rse;
  j["aggregate_rse"] = rep.aggregate_rse;
  j["iterations_run"] = rep.iterations_run;
  j["solver_wall_time_s"] = rep.solver_wall_time;
  j["leakage_probe"] = rep.leakage_probe;
  std::ofstream f(report_path);
  if (!f) throw std::runtime_error("cannot open for writing: " + report_path);
  f << j.dump(2) << '\n';
  std::cout << "aggregate_rse " << rep.aggregate_rse << '\n';
  return 0;
}

int cmd_trajectory(const std::string& data_dir, double dt, std::size_t n,
                   double alpha, ppmc::Index rank, int iters, ppmc::Seed seed,
                   const std::string& out_dir) {
  // Gather DATA_DIR/<user>/Trajectory/*.plt (first file per user).
  std::vector<std::pair<std::string, std::string>> files;  // user, path
  for (const auto& user_entry : fs::directory_iterator(data_dir)) {
    if (!user_entry.is_directory()) continue;
    const fs::path traj = user_entry.path() / "Trajectory";
    if (!fs::is_directory(traj)) continue;
    std::vector<std::string> plts;
    for (const auto& f : fs::directory_iterator(traj))
      if (f.path().extension() == ".plt") plts.push_back(f.path().string());
    std::sort(plts.begin(), plts.end());
    if (!plts.empty())
      files.emplace_back(user_entry.path().filename().string(), plts.front());
  }
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw std::runtime_error("no PLT files found under " + data_dir);

  std::vector<std::vector<ppmc::TrajectoryPoint>> all_points;
  double t0 = -1e300;
  for (const auto& [user, path] : files) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    all_points.push_back(ppmc::parse_plt(ss.str()));
    t0 = std::max(t0, all_points.back().front().timestamp);
  }
  std::vector<ppmc::SampledTrack> tracks;
  for (std::size_t k = 0; k < files.size(); ++k)
    tracks.push_back(
        ppmc::resample(all_points[k], t0, dt, n, files[k].first));
  ppmc::TrackMatrixPair truth = ppmc::assemble_matrices(tracks);

  // Synthetic loss on top of the sampling mask.
  const ppmc::ObservationMask loss = ppmc::ObservationMask::bernoulli(
      truth.lat_mat.rows(), truth.lat_mat.cols(), alpha, seed);
  ppmc::ObservationMask mask(
      ppmc::hadamard(truth.mask.bits(), loss.bits()));

  ppmc::SolverConfig cfg;
  cfg.rank = rank;
  cfg.max_iters = iters;
  const ppmc::CompletionResult lat =
      ppmc::pplnm_qr(ppmc::hadamard(truth.lat_mat, mask), mask, cfg);
  const ppmc::CompletionResult lon =
      ppmc::pplnm_qr(ppmc::hadamard(truth.lon_mat, mask), mask, cfg);

  ppmc::TrackMatrixPair rec = truth;
  rec.lat_mat = lat.recovered;
  rec.lon_mat = lon.recovered;
  const ppmc::TrackRse err = ppmc::track_rse(rec, truth);

  fs::create_directories(out_dir);
  for (std::size_t k = 0; k < files.size(); ++k) {
    std::ofstream f(fs::path(out_dir) /
                    (files[k].first + ".recovered.csv"));
    f << "timestamp,lat,lon\n";
    char buf[128];
    for (std::size_t i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n",
                    t0 + static_cast<double>(i) * dt,
                    rec.lat_mat(static_cast<ppmc::Index>(i),
                                static_cast<ppmc::Index>(k)),
                    rec.lon_mat(static_cast<ppmc::Index>(i),
                                static_cast<ppmc::Index>(k)));
      f << buf;
    }
  }
  std::ofstream summary(fs::path(out_dir) / "rse_summary.csv");
  summary << "user,rse\n";
  for (std::size_t k = 0; k < files.size(); ++k)
    summary << files[k].first << ',' << err.per_user[k] << '\n';
  summary << "aggregate," << err.aggregate << '\n';
  std::cout << "aggregate_rse " << err.aggregate << '\n';
  return 0;
}

std::vector<std::pair<ppmc::Index, ppmc::Index>> parse_sizes(
    const std::vector<ppmc::Index>& flat) {
  std::vector<std::pair<ppmc::Index, ppmc::Index>> sizes;
  for (ppmc::Index s : flat) sizes.emplace_back(s, s);
  return sizes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ppmc: privacy-preserving low-rank matrix completion"};
  app.require_subcommand(1);

  ppmc::Seed seed = 0;
  app.add_option("--seed", seed, "global RNG seed")->capture_default_str();

  // keygen
  auto* keygen = app.add_subcommand("keygen", "generate public matrix and per-user keys");
  ppmc::Index kg_users = 1, kg_rank = 1, kg_rows = 1;
  double kg_psi_min = 0.3;
  std::string kg_out = "keys";
  keygen->add_option("--users", kg_users, "number of users")->required();
  keygen->add_option("--public-rank", kg_rank, "public key count I")->required();
  keygen->add_option("--rows", kg_rows, "column length S")->required();
  keygen->add_option("--psi-min", kg_psi_min, "floor on psi_0")->capture_default_str();
  keygen->add_option("--out", kg_out, "output directory")->capture_default_str();

  // encrypt
  auto* encrypt = app.add_subcommand("encrypt", "encrypt a data matrix column by column");
  std::string en_in, en_mask, en_keys, en_out;
  encrypt->add_option("--in", en_in, "plain matrix CSV")->required();
  encrypt->add_option("--mask", en_mask, "0/1 mask CSV")->required();
  encrypt->add_option("--keys", en_keys, "key directory from keygen")->required();
  encrypt->add_option("--out", en_out, "encrypted matrix CSV")->required();

  // complete
  auto* complete = app.add_subcommand("complete", "run matrix completion");
  std::string co_in, co_mask, co_out, co_report, co_algo = "pplnm-qr";
  ppmc::SolverConfig co_cfg;
  complete->add_option("--in", co_in, "input matrix CSV")->required();
  complete->add_option("--mask", co_mask, "0/1 mask CSV")->required();
  complete->add_option("--rank", co_cfg.rank, "completion rank")->required();
  complete->add_option("--mu0", co_cfg.mu0, "initial penalty")->capture_default_str();
  complete->add_option("--rho", co_cfg.rho, "penalty growth")->capture_default_str();
  complete->add_option("--eps", co_cfg.eps, "squared-step stop threshold")->capture_default_str();
  complete->add_option("--iters", co_cfg.max_iters, "max iterations")->capture_default_str();
  complete->add_option("--algo", co_algo, "pplnm-qr or alt-min")
      ->check(CLI::IsMember({"pplnm-qr", "alt-min"}));
  complete->add_option("--out", co_out, "recovered matrix CSV")->required();
  complete->add_option("--report", co_report, "solver report JSON");

  // decrypt
  auto* decrypt = app.add_subcommand("decrypt", "decrypt a recovered matrix");
  std::string de_in, de_keys, de_out;
  decrypt->add_option("--in", de_in, "recovered matrix CSV")->required();
  decrypt->add_option("--keys", de_keys, "key directory from keygen")->required();
  decrypt->add_option("--out", de_out, "decrypted matrix CSV")->required();

  // session
  auto* session = app.add_subcommand("session", "end-to-end protocol simulation on synthetic data");
  ppmc::SessionConfig se_cfg;
  ppmc::Index se_rows = 200;
  std::string se_report = "session_report.json", se_uploads;
  session->add_option("--users", se_cfg.user_count, "user count K")->required();
  session->add_option("--rows", se_rows, "column length S")->capture_default_str();
  session->add_option("--data-rank", se_cfg.data_rank, "rank of the plain data")->required();
  session->add_option("--public-rank", se_cfg.public_rank, "public key count I")->required();
  session->add_option("--completion-rank", se_cfg.completion_rank,
                      "cloud completion rank (default data-rank + public-rank)");
  session->add_option("--alpha", se_cfg.alpha, "loss rate")->capture_default_str();
  session->add_option("--psi-min", se_cfg.psi_min, "floor on psi_0")->capture_default_str();
  session->add_option("--iters", se_cfg.solver.max_iters, "solver iterations")->capture_default_str();
  session->add_option("--report", se_report, "report JSON path")->capture_default_str();
  session->add_option("--uploads", se_uploads, "dump upload records (JSON lines)");

  // bench
  auto* bench = app.add_subcommand("bench", "synthetic speed/accuracy benchmark");
  std::vector<ppmc::Index> be_sizes{128, 256, 512, 1024};
  std::vector<int> be_iters{100, 300};
  std::vector<std::string> be_algos{"pplnm-qr", "alt-min"};
  bool be_allow_large = false;
  std::string be_out = "bench.csv", be_format = "csv";
  bench->add_option("--sizes", be_sizes, "square sizes")->capture_default_str();
  bench->add_option("--iters", be_iters, "iteration counts")->capture_default_str();
  bench->add_option("--algos", be_algos, "algorithms")->capture_default_str();
  bench->add_flag("--allow-large", be_allow_large, "permit sizes above 1024");
  bench->add_option("--out", be_out, "output path")->capture_default_str();
  bench->add_option("--format", be_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "recovery error versus loss rate");
  std::size_t sw_rows = 235, sw_cols = 50;
  ppmc::Index sw_rank = 3;
  std::vector<double> sw_alphas{0.1, 0.3, 0.5, 0.7, 0.9};
  int sw_seeds = 10, sw_iters = 100;
  std::string sw_out = "sweep.csv";
  sweep->add_option("--rows", sw_rows, "grid length")->capture_default_str();
  sweep->add_option("--cols", sw_cols, "user count")->capture_default_str();
  sweep->add_option("--rank", sw_rank, "track rank")->capture_default_str();
  sweep->add_option("--alphas", sw_alphas, "loss rates")->capture_default_str();
  sweep->add_option("--seeds-per-alpha", sw_seeds, "seeds per loss rate")->capture_default_str();
  sweep->add_option("--iters", sw_iters, "solver iterations")->capture_default_str();
  sweep->add_option("--out", sw_out, "output CSV")->capture_default_str();

  // trajectory
  auto* traj = app.add_subcommand("trajectory", "Geolife PLT recovery pipeline");
  std::string tr_data, tr_out = "trajectory_out";
  double tr_dt = 5.0, tr_alpha = 0.5;
  std::size_t tr_n = 235;
  ppmc::Index tr_rank = 3;
  int tr_iters = 100;
  traj->add_option("--data", tr_data, "Geolife root (DATA_DIR/<user>/Trajectory/*.plt)")->required();
  traj->add_option("--dt", tr_dt, "grid step, seconds")->capture_default_str();
  traj->add_option("--n", tr_n, "grid slots")->capture_default_str();
  traj->add_option("--alpha", tr_alpha, "synthetic loss rate")->capture_default_str();
  traj->add_option("--rank", tr_rank, "completion rank")->capture_default_str();
  traj->add_option("--iters", tr_iters, "solver iterations")->capture_default_str();
  traj->add_option("--out", tr_out, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*keygen)
      return cmd_keygen(kg_users, kg_rank, kg_rows, kg_psi_min, seed, kg_out);
    if (*encrypt) return cmd_encrypt(en_in, en_mask, en_keys, en_out);
    if (*complete)
      return cmd_complete(co_in, co_mask, co_cfg, co_algo, co_out, co_report);
    if (*decrypt) return cmd_decrypt(de_in, de_keys, de_out);
    if (*session) {
      se_cfg.seed = seed;
      return cmd_session_rows(se_cfg, se_rows, se_report, se_uploads);
    }
    if (*bench) {
      for (ppmc::Index s : be_sizes)
        if (s > 1024 && !be_allow_large)
          throw std::invalid_argument(
              "sizes above 1024 require --allow-large");
      const auto rows =
          ppmc::bench_synthetic(parse_sizes(be_sizes), be_iters, be_algos, seed);
      ppmc::emit_report(rows, be_format, be_out, ppmc::ReportMeta{seed, "bench"});
      for (const auto& r : rows)
        std::cout << r.rows << 'x' << r.cols << " K=" << r.iters << ' '
                  << r.algo << " time=" << r.wall_time << "s rse=" << r.rse_value
                  << '\n';
      return 0;
    }
    if (*sweep) {
      ppmc::SolverConfig cfg;
      cfg.max_iters = sw_iters;
      const auto rows = ppmc::loss_sweep(sw_rows, sw_cols, sw_rank, sw_alphas,
                                         sw_seeds, cfg, seed);
      ppmc::emit_sweep(rows, sw_out, ppmc::ReportMeta{seed, "sweep"});
      for (const auto& r : rows)
        std::cout << "alpha=" << r.alpha << " median_rse=" << r.median_rse
                  << '\n';
      return 0;
    }
    if (*traj)
      return cmd_trajectory(tr_data, tr_dt, tr_n, tr_alpha, tr_rank, tr_iters,
                            seed, tr_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
