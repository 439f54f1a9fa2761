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

#include <random>
#include <sstream>

#include "ppmc/io.hpp"
#include "ppmc/matrix.hpp"

using namespace ppmc;

namespace {
Matrix random_matrix(Index s, Index t, Seed seed) {
  std::mt19937_64 rng(seed);
  return gaussian_matrix(s, t, rng);
}
}  // namespace

TEST_CASE("hadamard entrywise examples") {
  Matrix a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 1, 0, 0, 1;
  Matrix expect(2, 2);
  expect << 1, 0, 0, 4;
  CHECK(hadamard(a, b) == expect);

  Matrix ones = Matrix::Ones(2, 2);
  CHECK(hadamard(a, ones) == a);

  Matrix c(1, 2), d(1, 2);
  c << 2, 3;
  d << 5, 7;
  Matrix cd(1, 2);
  cd << 10, 21;
  CHECK(hadamard(c, d) == cd);

  CHECK_THROWS_AS(hadamard(a, c), std::invalid_argument);
}

TEST_CASE("hadamard commutes and distributes over addition") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix a = gaussian_matrix(5, 7, rng);
    Matrix b = gaussian_matrix(5, 7, rng);
    Matrix c = gaussian_matrix(5, 7, rng);
    CHECK((hadamard(a, b) - hadamard(b, a)).norm() == 0.0);
    CHECK((hadamard(a, b + c) - hadamard(a, b) - hadamard(a, c)).norm() <=
          1e-12 * (a.norm() * (b.norm() + c.norm()) + 1.0));
  }
}

TEST_CASE("frobenius norm") {
  CHECK(frobenius_norm(Matrix::Zero(3, 4)) == 0.0);
  Matrix a(1, 2);
  a << 3, 4;
  CHECK(frobenius_norm(a) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(frobenius_norm(Matrix::Identity(4, 4)) ==
        doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("l21 norm is column-wise") {
  CHECK(l21_norm(Matrix::Zero(3, 3)) == 0.0);
  CHECK(l21_norm(Matrix::Identity(3, 3)) == doctest::Approx(3.0));
  Matrix a(2, 2);
  a << 3, 0, 4, 0;
  CHECK(l21_norm(a) == doctest::Approx(5.0));
}

TEST_CASE("l21 norm dominates frobenius norm") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix a = gaussian_matrix(6, 9, rng);
    CHECK(l21_norm(a) >= frobenius_norm(a) - 1e-12);
  }
}

TEST_CASE("qr_thin identity") {
  QrThin qr = qr_thin(Matrix::Identity(4, 4));
  CHECK((qr.q * qr.rtri - Matrix::Identity(4, 4)).norm() <= 1e-12);
  CHECK((qr.q.transpose() * qr.q - Matrix::Identity(4, 4)).norm() <= 1e-12);
}

TEST_CASE("qr_thin orthogonality and reconstruction on random input") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const Index s = 8 + static_cast<Index>(rng() % 24);
    const Index r = 1 + static_cast<Index>(rng() % 5);
    Matrix a = gaussian_matrix(s, r, rng);
    QrThin qr = qr_thin(a);
    CHECK((qr.q.transpose() * qr.q - Matrix::Identity(r, r))
              .cwiseAbs()
              .maxCoeff() <= 1e-10);
    CHECK((qr.q * qr.rtri - a).norm() <= 1e-10 * a.norm());
    for (Index j = 0; j < r; ++j) {
      CHECK(qr.rtri(j, j) >= 0.0);
      for (Index i = j + 1; i < r; ++i) CHECK(qr.rtri(i, j) == 0.0);
    }
  }
}

TEST_CASE("qr_thin tolerates duplicated columns") {
  std::mt19937_64 rng(14);
  Matrix a = gaussian_matrix(8, 3, rng);
  a.col(2) = a.col(0);
  QrThin qr = qr_thin(a);
  CHECK((qr.q.transpose() * qr.q - Matrix::Identity(3, 3))
            .cwiseAbs()
            .maxCoeff() <= 1e-10);
  CHECK((qr.q * qr.rtri - a).norm() <= 1e-10 * a.norm());
}

TEST_CASE("rse examples") {
  Matrix t(1, 2);
  t << 3, 4;
  CHECK(rse(t, t) == 0.0);
  CHECK(rse(Matrix::Zero(1, 2), t) == doctest::Approx(1.0));
  Matrix r(1, 2);
  r << 3, 0;
  CHECK(rse(r, t) == doctest::Approx(0.8));
  CHECK_THROWS_AS(rse(Matrix::Zero(1, 2), Matrix::Zero(1, 2)),
                  std::domain_error);
}

TEST_CASE("rse error is scale-covariant") {
  std::mt19937_64 rng(15);
  Matrix t = gaussian_matrix(6, 6, rng);
  Matrix e = gaussian_matrix(6, 6, rng);
  const double base = rse(t + e, t);
  for (double c : {2.0, -3.0, 0.25}) {
    CHECK(rse(t + c * e, t) ==
          doctest::Approx(std::abs(c) * base).epsilon(1e-12));
  }
}

TEST_CASE("gen_low_rank rank and determinism") {
  const Matrix a = gen_low_rank(2, 2, 1, 42);
  CHECK(std::abs(a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) <= 1e-10);

  const Matrix b = gen_low_rank(128, 128, 2, 7);
  Eigen::BDCSVD<Matrix> svd(b);
  CHECK(svd.singularValues()(2) <= 1e-10 * svd.singularValues()(0));

  CHECK(gen_low_rank(16, 16, 3, 9) == gen_low_rank(16, 16, 3, 9));
  CHECK_THROWS_AS(gen_low_rank(4, 4, 5, 0), std::domain_error);
  CHECK_THROWS_AS(gen_low_rank(4, 4, 0, 0), std::domain_error);
}

TEST_CASE("gen_low_rank rank oracle on small instances") {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 16 + static_cast<Index>(rng() % 49);
    const Index r = 1 + static_cast<Index>(rng() % 4);
    const Matrix a = gen_low_rank(n, n, r, rng());
    Eigen::BDCSVD<Matrix> svd(a);
    CHECK(svd.singularValues()(r - 1) > 1e-8 * svd.singularValues()(0));
    if (r < n)
      CHECK(svd.singularValues()(r) <= 1e-10 * svd.singularValues()(0));
  }
}

TEST_CASE("gen_mask extremes and concentration") {
  CHECK(gen_mask(4, 4, 0.0, 1).bits() == Matrix::Ones(4, 4));
  CHECK(gen_mask(4, 4, 1.0, 1).bits() == Matrix::Zero(4, 4));
  const ObservationMask m = gen_mask(128, 128, 0.5, 3);
  const double frac =
      static_cast<double>(m.observed_count()) / (128.0 * 128.0);
  CHECK(frac >= 0.45);
  CHECK(frac <= 0.55);
  CHECK(gen_mask(16, 16, 0.3, 5).bits() == gen_mask(16, 16, 0.3, 5).bits());
  CHECK_THROWS_AS(gen_mask(4, 4, 1.5, 0), std::domain_error);
}

TEST_CASE("observation mask rejects non-binary entries") {
  Matrix bad(1, 2);
  bad << 1, 0.5;
  CHECK_THROWS_AS(ObservationMask{bad}, std::invalid_argument);
}

TEST_CASE("csv round trip keeps full precision") {
  const Matrix a = random_matrix(7, 5, 21);
  std::stringstream ss;
  write_csv(ss, a);
  const Matrix b = read_csv(ss);
  CHECK(a == b);
}

TEST_CASE("csv parse errors carry location") {
  std::stringstream ss("1,2\n3,oops\n");
  try {
    read_csv(ss);
    FAIL("expected parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
  std::stringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(read_csv(ragged), std::runtime_error);
  std::stringstream empty("");
  CHECK_THROWS_AS(read_csv(empty), std::runtime_error);
}

TEST_CASE("synthetic rank rounding") {
  CHECK(synthetic_rank(128, 128) == 2);
  CHECK(synthetic_rank(512, 512) == 6);
  CHECK(synthetic_rank(8, 8) == 1);
  CHECK(synthetic_rank(100, 100) == 1);
}
