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
// In-process simulation of the one-round protocol: each user encrypts a
// column and uploads it with its observed bits, the cloud assembles the
// encrypted matrix and completes it, users download and decrypt.

#ifndef PPMC_SESSION_HPP_
#define PPMC_SESSION_HPP_

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppmc/crypto.hpp"
#include "ppmc/matrix.hpp"
#include "ppmc/solver.hpp"

namespace ppmc {

struct SessionConfig {
  Index user_count = 1;
  Index public_rank = 1;     // I
  Index data_rank = 1;       // r
  Index completion_rank = 0; // 0 means default r + I
  double alpha = 0.0;
  double psi_min = 0.3;
  SolverConfig solver;
  Seed seed = 0;

  Index effective_completion_rank() const {
    return completion_rank > 0 ? completion_rank : data_rank + public_rank;
  }
};

struct SessionReport {
  std::vector<double> per_user_rse;
  double aggregate_rse = 0.0;
  int iterations_run = 0;
  double solver_wall_time = 0.0;
  double leakage_probe = 0.0;
};

/// Max over columns of |Pearson correlation| between plain and encrypted
/// values restricted to the observed entries. Columns that are constant on
/// the support contribute zero.
inline double leakage_probe(const Matrix& plain, const Matrix& encrypted,
                            const ObservationMask& mask) {
  require_same_shape(plain, encrypted, "leakage_probe");
  require_same_shape(plain, mask.bits(), "leakage_probe");
  double worst = 0.0;
  for (Index k = 0; k < plain.cols(); ++k) {
    double n = 0.0, sp = 0.0, se = 0.0, spp = 0.0, see = 0.0, spe = 0.0;
    for (Index i = 0; i < plain.rows(); ++i) {
      if (mask.bits()(i, k) == 0.0) continue;
      const double p = plain(i, k), e = encrypted(i, k);
      n += 1.0;
      sp += p;
      se += e;
      spp += p * p;
      see += e * e;
      spe += p * e;
    }
    if (n < 2.0) continue;
    const double var_p = spp - sp * sp / n;
    const double var_e = see - se * se / n;
    if (var_p <= 0.0 || var_e <= 0.0) continue;
    const double cov = spe - sp * se / n;
    worst = std::max(worst, std::abs(cov / std::sqrt(var_p * var_e)));
  }
  return worst;
}

inline double leakage_probe(const Matrix& plain, const Matrix& encrypted) {
  return leakage_probe(plain, encrypted,
                       ObservationMask(plain.rows(), plain.cols()));
}

struct SessionArtifacts {
  PublicMatrix pub;
  std::vector<PrivateKeys> keys;
  ObservationMask mask{0, 0};
  Matrix encrypted;   // assembled uploads
  Matrix recovered;   // cloud output (still encrypted)
  Matrix decrypted;
};

inline SessionReport run_session(const Matrix& truth, const SessionConfig& cfg,
                                 SessionArtifacts* artifacts = nullptr) {
  const Index s = truth.rows(), users = truth.cols();
  if (users != cfg.user_count)
    throw std::invalid_argument("run_session: truth column count != users");

  std::mt19937_64 seeder(cfg.seed);
  const PublicMatrix pub = gen_public_matrix(s, cfg.public_rank, seeder());
  ObservationMask mask =
      ObservationMask::bernoulli(s, users, cfg.alpha, seeder());

  std::vector<PrivateKeys> keys;
  Matrix encrypted(s, users);
  for (Index k = 0; k < users; ++k) {
    PrivateKeys pk = gen_private_keys(cfg.public_rank, cfg.psi_min, seeder());
    pk.user_id = "user_" + std::to_string(k);
    encrypted.col(k) =
        encrypt_column(truth.col(k), mask.bits().col(k), pub, pk).data;
    keys.push_back(std::move(pk));
  }

  SolverConfig solver = cfg.solver;
  solver.rank = cfg.effective_completion_rank();
  const CompletionResult completed = pplnm_qr(encrypted, mask, solver);

  Matrix decrypted(s, users);
  for (Index k = 0; k < users; ++k)
    decrypted.col(k) = decrypt_column(completed.recovered.col(k), pub,
                                      keys[static_cast<std::size_t>(k)]);

  SessionReport report;
  double num_sq = 0.0, den_sq = 0.0;
  for (Index k = 0; k < users; ++k) {
    const double num = (truth.col(k) - decrypted.col(k)).squaredNorm();
    const double den = truth.col(k).squaredNorm();
    report.per_user_rse.push_back(den > 0.0 ? std::sqrt(num / den) : 0.0);
    num_sq += num;
    den_sq += den;
  }
  if (den_sq == 0.0) throw std::domain_error("run_session: zero-norm truth");
  report.aggregate_rse = std::sqrt(num_sq / den_sq);
  report.iterations_run = completed.iterations_run;
  report.solver_wall_time = completed.wall_time;
  report.leakage_probe = leakage_probe(truth, encrypted, mask);

  if (artifacts)
    *artifacts = SessionArtifacts{pub,
                                  std::move(keys),
                                  std::move(mask),
                                  std::move(encrypted),
                                  completed.recovered,
                                  std::move(decrypted)};
  return report;
}

// ---------------------------------------------------------------------------
// Wire formats: JSON lines, one record per user.
// ---------------------------------------------------------------------------

struct UploadRecord {
  std::string user_id;
  std::vector<double> column;
  std::vector<int> observed;
};

struct DownloadRecord {
  std::string user_id;
  std::vector<double> column;
};

inline void write_upload_records(std::ostream& os,
                                 const std::vector<UploadRecord>& records) {
  for (const auto& rec : records)
    os << nlohmann::json{{"user_id", rec.user_id},
                         {"column", rec.column},
                         {"observed", rec.observed}}
              .dump()
       << '\n';
}

inline std::vector<UploadRecord> read_upload_records(std::istream& is) {
  std::vector<UploadRecord> records;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const nlohmann::json j = nlohmann::json::parse(line);
    UploadRecord rec;
    rec.user_id = j.at("user_id").get<std::string>();
    rec.column = j.at("column").get<std::vector<double>>();
    rec.observed = j.at("observed").get<std::vector<int>>();
    if (rec.column.size() != rec.observed.size())
      throw std::runtime_error("upload record: column/observed length mismatch");
    records.push_back(std::move(rec));
  }
  return records;
}

inline void write_download_records(
    std::ostream& os, const std::vector<DownloadRecord>& records) {
  for (const auto& rec : records)
    os << nlohmann::json{{"user_id", rec.user_id}, {"column", rec.column}}
              .dump()
       << '\n';
}

inline std::vector<DownloadRecord> read_download_records(std::istream& is) {
  std::vector<DownloadRecord> records;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const nlohmann::json j = nlohmann::json::parse(line);
    records.push_back(DownloadRecord{
        j.at("user_id").get<std::string>(),
        j.at("column").get<std::vector<double>>()});
  }
  return records;
}

/// Assembles uploads into the encrypted matrix plus mask, preserving record
/// order as column order.
inline std::pair<Matrix, ObservationMask> assemble_uploads(
    const std::vector<UploadRecord>& records) {
  if (records.empty())
    throw std::invalid_argument("assemble_uploads: no records");
  const Index s = static_cast<Index>(records.front().column.size());
  Matrix enc(s, static_cast<Index>(records.size()));
  Matrix bits(s, static_cast<Index>(records.size()));
  for (std::size_t k = 0; k < records.size(); ++k) {
    if (static_cast<Index>(records[k].column.size()) != s)
      throw std::invalid_argument("assemble_uploads: ragged columns");
    for (Index i = 0; i < s; ++i) {
      enc(i, static_cast<Index>(k)) =
          records[k].column[static_cast<std::size_t>(i)];
      bits(i, static_cast<Index>(k)) =
          records[k].observed[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
    }
  }
  return {std::move(enc), ObservationMask(std::move(bits))};
}

}  // namespace ppmc

#endif  // PPMC_SESSION_HPP_
