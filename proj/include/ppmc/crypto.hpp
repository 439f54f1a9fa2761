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
// Lightweight additive masking: a user's column is blended with the shared
// public-key columns under secret convex weights, then restricted to the
// observed entries. Decryption inverts the blend; it is exact wherever the
// entry survived (or was later completed).

#ifndef PPMC_CRYPTO_HPP_
#define PPMC_CRYPTO_HPP_

#include <string>
#include <vector>

#include <json.hpp>

#include "ppmc/io.hpp"
#include "ppmc/matrix.hpp"

namespace ppmc {

/// Shared S x I key matrix; column i is public key P_i.
struct PublicMatrix {
  Matrix p;
  Index key_count() const { return p.cols(); }
  Index rows() const { return p.rows(); }
};

/// Convex weights psi_0..psi_I; psi_0 scales the user's own data.
struct PrivateKeys {
  std::string user_id;
  std::vector<double> psi;  // size I + 1
  double psi_min = 0.3;
  Seed seed = 0;

  double psi0() const { return psi.front(); }
  Index key_count() const { return static_cast<Index>(psi.size()) - 1; }
};

struct EncryptedColumn {
  Vector data;
  std::string user_id;
};

inline PublicMatrix gen_public_matrix(Index rows, Index key_count,
                                      Seed seed) {
  std::mt19937_64 rng(seed);
  return PublicMatrix{gaussian_matrix(rows, key_count, rng)};
}

/// psi_0 is uniform on [psi_min, 1]; the remaining mass 1 - psi_0 is split
/// across psi_1..psi_I proportionally to uniform draws. The floor on psi_0
/// bounds decryption error amplification by 1/psi_min.
inline PrivateKeys gen_private_keys(Index key_count, double psi_min,
                                    Seed seed) {
  if (!(psi_min > 0.0 && psi_min < 1.0))
    throw std::domain_error("gen_private_keys: psi_min must lie in (0,1)");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  PrivateKeys keys;
  keys.psi_min = psi_min;
  keys.seed = seed;
  keys.psi.resize(static_cast<std::size_t>(key_count) + 1);
  keys.psi[0] = psi_min + (1.0 - psi_min) * unif(rng);
  double total = 0.0;
  std::vector<double> draws(static_cast<std::size_t>(key_count));
  for (auto& d : draws) {
    d = unif(rng);
    total += d;
  }
  const double rest = 1.0 - keys.psi[0];
  for (std::size_t i = 0; i < draws.size(); ++i)
    keys.psi[i + 1] = total > 0.0 ? rest * draws[i] / total
                                  : rest / static_cast<double>(key_count);
  return keys;
}

inline Vector public_blend(const PublicMatrix& pub, const PrivateKeys& keys) {
  Vector blend = Vector::Zero(pub.rows());
  for (Index i = 0; i < pub.key_count(); ++i)
    blend += keys.psi[static_cast<std::size_t>(i) + 1] * pub.p.col(i);
  return blend;
}

inline EncryptedColumn encrypt_column(const Vector& m, const Vector& mask_col,
                                      const PublicMatrix& pub,
                                      const PrivateKeys& keys) {
  if (m.size() != mask_col.size() || m.size() != pub.rows())
    throw std::invalid_argument("encrypt_column: length mismatch");
  if (keys.key_count() != pub.key_count())
    throw std::invalid_argument("encrypt_column: key count mismatch");
  Vector enc = (keys.psi0() * m + public_blend(pub, keys))
                   .cwiseProduct(mask_col);
  return EncryptedColumn{std::move(enc), keys.user_id};
}

inline Vector decrypt_column(const Vector& m_hat, const PublicMatrix& pub,
                             const PrivateKeys& keys) {
  if (m_hat.size() != pub.rows())
    throw std::invalid_argument("decrypt_column: length mismatch");
  if (keys.key_count() != pub.key_count())
    throw std::invalid_argument("decrypt_column: key count mismatch");
  if (keys.psi0() == 0.0)
    throw std::domain_error("decrypt_column: psi_0 is zero");
  return (m_hat - public_blend(pub, keys)) / keys.psi0();
}

inline nlohmann::json keys_to_json(const PrivateKeys& keys) {
  return nlohmann::json{{"user_id", keys.user_id},
                        {"psi", keys.psi},
                        {"psi_min", keys.psi_min},
                        {"seed", keys.seed}};
}

inline PrivateKeys keys_from_json(const nlohmann::json& j) {
  PrivateKeys keys;
  keys.user_id = j.at("user_id").get<std::string>();
  keys.psi = j.at("psi").get<std::vector<double>>();
  keys.psi_min = j.at("psi_min").get<double>();
  keys.seed = j.at("seed").get<Seed>();
  if (keys.psi.empty())
    throw std::runtime_error("keys_from_json: empty psi vector");
  return keys;
}

inline void save_keys(const std::string& path, const PrivateKeys& keys) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << keys_to_json(keys).dump(2) << '\n';
}

inline PrivateKeys load_keys(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  nlohmann::json j;
  f >> j;
  return keys_from_json(j);
}

}  // namespace ppmc

#endif  // PPMC_CRYPTO_HPP_
