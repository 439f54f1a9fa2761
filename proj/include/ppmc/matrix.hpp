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

#ifndef PPMC_MATRIX_HPP_
#define PPMC_MATRIX_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace ppmc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using Seed = std::uint64_t;

/// Binary observation pattern: 1 marks an observed entry, 0 a missing one.
class ObservationMask {
 public:
  ObservationMask(Index rows, Index cols)
      : bits_(Matrix::Ones(rows, cols)) {}

  explicit ObservationMask(Matrix bits) : bits_(std::move(bits)) {
    for (Index j = 0; j < bits_.cols(); ++j)
      for (Index i = 0; i < bits_.rows(); ++i) {
        const double b = bits_(i, j);
        if (b != 0.0 && b != 1.0)
          throw std::invalid_argument(
              "ObservationMask: entry (" + std::to_string(i) + "," +
              std::to_string(j) + ") is not 0 or 1");
      }
  }

  /// Each entry is missing independently with probability `alpha`.
  static ObservationMask bernoulli(Index rows, Index cols, double alpha,
                                   Seed seed) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
      throw std::domain_error("gen_mask: alpha must lie in [0,1]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Matrix bits(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j)
        bits(i, j) = unif(rng) < alpha ? 0.0 : 1.0;
    return ObservationMask(std::move(bits));
  }

  Index rows() const { return bits_.rows(); }
  Index cols() const { return bits_.cols(); }
  const Matrix& bits() const { return bits_; }
  Index observed_count() const {
    return static_cast<Index>(std::lround(bits_.sum()));
  }

 private:
  Matrix bits_;
};

inline void require_same_shape(const Matrix& a, const Matrix& b,
                               const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string(op) + ": shape mismatch (" +
                                std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " vs " +
                                std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()) + ")");
}

inline Matrix hadamard(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "hadamard");
  return a.cwiseProduct(b);
}

inline Matrix hadamard(const Matrix& a, const ObservationMask& mask) {
  return hadamard(a, mask.bits());
}

inline double frobenius_norm(const Matrix& a) { return a.norm(); }

/// Sum of Euclidean norms of the columns.
inline double l21_norm(const Matrix& a) {
  double s = 0.0;
  for (Index j = 0; j < a.cols(); ++j) s += a.col(j).norm();
  return s;
}

struct QrThin {
  Matrix q;     // S x r, orthonormal columns
  Matrix rtri;  // r x r, upper triangular with nonnegative diagonal
};

/// Thin Householder QR of an S x r matrix, S >= r. Column signs are flipped
/// so that rtri has a nonnegative diagonal, making the factorization unique
/// for full-rank input.
inline QrThin qr_thin(const Matrix& a) {
  if (a.rows() < a.cols())
    throw std::invalid_argument("qr_thin: need rows >= cols");
  const Index r = a.cols();
  Eigen::HouseholderQR<Matrix> qr(a);
  QrThin out;
  out.q = qr.householderQ() * Matrix::Identity(a.rows(), r);
  out.rtri = qr.matrixQR()
                 .topRows(r)
                 .template triangularView<Eigen::Upper>();
  for (Index j = 0; j < r; ++j) {
    if (out.rtri(j, j) < 0.0) {
      out.rtri.row(j) = -out.rtri.row(j);
      out.q.col(j) = -out.q.col(j);
    }
  }
  return out;
}

/// Relative recovery error ||truth - recovered||_F / ||truth||_F.
inline double rse(const Matrix& recovered, const Matrix& truth) {
  require_same_shape(recovered, truth, "rse");
  const double denom = truth.norm();
  if (denom == 0.0) throw std::domain_error("rse: zero-norm truth matrix");
  return (truth - recovered).norm() / denom;
}

inline Matrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) out(i, j) = normal(rng);
  return out;
}

/// Product of two i.i.d. standard-normal factors; rank r almost surely.
inline Matrix gen_low_rank(Index rows, Index cols, Index rank, Seed seed) {
  if (rank < 1 || rank > std::min(rows, cols))
    throw std::domain_error("gen_low_rank: rank out of range");
  std::mt19937_64 rng(seed);
  Matrix a = gaussian_matrix(rows, rank, rng);
  Matrix b = gaussian_matrix(rank, cols, rng);
  return a * b;
}

inline ObservationMask gen_mask(Index rows, Index cols, double alpha,
                                Seed seed) {
  return ObservationMask::bernoulli(rows, cols, alpha, seed);
}

/// Rank used for the synthetic experiments: 1% of the smaller dimension,
/// rounded up and floored at one.
inline Index synthetic_rank(Index rows, Index cols) {
  const double m = static_cast<double>(std::min(rows, cols));
  return std::max<Index>(1, static_cast<Index>(std::ceil(0.01 * m)));
}

}  // namespace ppmc

#endif  // PPMC_MATRIX_HPP_
