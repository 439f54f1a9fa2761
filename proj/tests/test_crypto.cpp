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

#include <doctest.h>

#include <numeric>
#include <sstream>

#include "ppmc/crypto.hpp"

using namespace ppmc;

namespace {
PrivateKeys make_keys(std::vector<double> psi) {
  PrivateKeys k;
  k.user_id = "test";
  k.psi = std::move(psi);
  return k;
}
}  // namespace

TEST_CASE("gen_public_matrix determinism and rank") {
  CHECK(gen_public_matrix(4, 2, 7).p == gen_public_matrix(4, 2, 7).p);
  CHECK(gen_public_matrix(10, 1, 0).p.cols() == 1);
  const PublicMatrix pub = gen_public_matrix(100, 5, 3);
  Eigen::BDCSVD<Matrix> svd(pub.p);
  CHECK(svd.singularValues()(4) > 1e-8 * svd.singularValues()(0));
}

TEST_CASE("gen_private_keys invariants") {
  for (Seed seed = 0; seed < 50; ++seed) {
    const PrivateKeys keys = gen_private_keys(4, 0.3, seed);
    REQUIRE(keys.psi.size() == 5);
    const double sum =
        std::accumulate(keys.psi.begin(), keys.psi.end(), 0.0);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    CHECK(keys.psi0() >= 0.3);
    for (double p : keys.psi) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
  }
  const PrivateKeys tight = gen_private_keys(3, 0.999, 1);
  CHECK(tight.psi0() >= 0.999);
  for (std::size_t i = 1; i < tight.psi.size(); ++i)
    CHECK(tight.psi[i] <= 0.001);
  CHECK_THROWS_AS(gen_private_keys(3, 0.0, 0), std::domain_error);
  CHECK_THROWS_AS(gen_private_keys(3, 1.0, 0), std::domain_error);
}

TEST_CASE("psi_min floor holds across many samples") {
  double min_psi0 = 1.0;
  for (Seed seed = 0; seed < 1000; ++seed)
    min_psi0 = std::min(min_psi0, gen_private_keys(3, 0.3, seed).psi0());
  CHECK(min_psi0 >= 0.3);
}

TEST_CASE("encrypt_column hand examples") {
  // Identity key: psi_0 = 1 (floor relaxed by direct construction).
  PublicMatrix pub{Matrix::Zero(2, 1)};
  pub.p << 1, 3;
  Vector m(2);
  m << 2, 4;
  Vector full(2);
  full << 1, 1;

  const EncryptedColumn id_enc =
      encrypt_column(m, full, pub, make_keys({1.0, 0.0}));
  CHECK(id_enc.data == m);

  const EncryptedColumn enc =
      encrypt_column(m, full, pub, make_keys({0.5, 0.5}));
  Vector expect(2);
  expect << 1.5, 3.5;
  CHECK((enc.data - expect).norm() <= 1e-15);

  CHECK(encrypt_column(m, Vector::Zero(2), pub, make_keys({0.5, 0.5}))
            .data.isZero(0.0));

  CHECK_THROWS_AS(encrypt_column(Vector::Zero(3), full, pub,
                                 make_keys({0.5, 0.5})),
                  std::invalid_argument);
}

TEST_CASE("decrypt_column hand example and errors") {
  PublicMatrix pub{Matrix::Zero(2, 1)};
  pub.p << 1, 3;
  Vector m_hat(2);
  m_hat << 1.5, 3.5;
  const Vector dec = decrypt_column(m_hat, pub, make_keys({0.5, 0.5}));
  Vector expect(2);
  expect << 2, 4;
  CHECK((dec - expect).norm() <= 1e-14);

  // Pure mask decrypts to zero.
  const Vector pure = 0.5 * pub.p.col(0);
  CHECK(decrypt_column(pure, pub, make_keys({0.5, 0.5})).norm() <= 1e-14);

  CHECK_THROWS_AS(decrypt_column(m_hat, pub, make_keys({0.0, 1.0})),
                  std::domain_error);
}

TEST_CASE("roundtrip on full masks") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const Index s = 4 + static_cast<Index>(rng() % 60);
    const Index i_count = 1 + static_cast<Index>(rng() % 6);
    const PublicMatrix pub = gen_public_matrix(s, i_count, rng());
    const PrivateKeys keys = gen_private_keys(i_count, 0.3, rng());
    const Vector m = gaussian_matrix(s, 1, rng).col(0);
    const Vector full = Vector::Ones(s);
    const Vector back =
        decrypt_column(encrypt_column(m, full, pub, keys).data, pub, keys);
    CHECK((back - m).cwiseAbs().maxCoeff() <=
          1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("masked roundtrip recovers only observed positions") {
  std::mt19937_64 rng(32);
  const Index s = 32;
  const PublicMatrix pub = gen_public_matrix(s, 3, rng());
  const PrivateKeys keys = gen_private_keys(3, 0.3, rng());
  const Vector m = gaussian_matrix(s, 1, rng).col(0);
  Vector mask = Vector::Ones(s);
  for (Index i = 0; i < s; i += 2) mask(i) = 0.0;

  const Vector dec =
      decrypt_column(encrypt_column(m, mask, pub, keys).data, pub, keys);
  const Vector blend = public_blend(pub, keys);
  for (Index i = 0; i < s; ++i) {
    if (mask(i) == 1.0) {
      CHECK(std::abs(dec(i) - m(i)) <= 1e-12);
    } else {
      // Missing positions decrypt to the negated blend, not to the data:
      // masking alone does not complete anything.
      CHECK(std::abs(dec(i) - (-blend(i) / keys.psi0())) <= 1e-12);
      CHECK(std::abs(dec(i) - m(i)) > 1e-12);
    }
  }
}

TEST_CASE("rank inflation is bounded by r + I") {
  std::mt19937_64 rng(33);
  const Index s = 40, users = 20, r = 2, i_count = 3;
  const Matrix data = gen_low_rank(s, users, r, rng());
  const PublicMatrix pub = gen_public_matrix(s, i_count, rng());
  Matrix enc(s, users);
  for (Index k = 0; k < users; ++k)
    enc.col(k) = encrypt_column(data.col(k), Vector::Ones(s), pub,
                                gen_private_keys(i_count, 0.3, rng()))
                     .data;
  Eigen::BDCSVD<Matrix> svd(enc);
  const double top = svd.singularValues()(0);
  CHECK(svd.singularValues()(r + i_count) <= 1e-10 * top);
}

TEST_CASE("decryption amplifies additive error by exactly 1/psi0") {
  std::mt19937_64 rng(34);
  const Index s = 16;
  const PublicMatrix pub = gen_public_matrix(s, 2, rng());
  const PrivateKeys keys = gen_private_keys(2, 0.3, rng());
  const Vector m_hat = gaussian_matrix(s, 1, rng).col(0);
  const Vector noise = gaussian_matrix(s, 1, rng).col(0);
  const Vector base = decrypt_column(m_hat, pub, keys);
  const Vector noisy = decrypt_column(m_hat + noise, pub, keys);
  CHECK((noisy - base - noise / keys.psi0()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("keys json round trip") {
  PrivateKeys keys = gen_private_keys(4, 0.3, 99);
  keys.user_id = "user_7";
  const PrivateKeys back = keys_from_json(keys_to_json(keys));
  CHECK(back.user_id == keys.user_id);
  CHECK(back.psi == keys.psi);
  CHECK(back.psi_min == keys.psi_min);
  CHECK(back.seed == keys.seed);
}
