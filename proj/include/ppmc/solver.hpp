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
// PPLNM-QR: ADMM over a QR-maintained tri-factorization X ~ L*D*R with
// column-wise L2,1 shrinkage of the core factor, plus an alternating
// least-squares baseline for comparison.

#ifndef PPMC_SOLVER_HPP_
#define PPMC_SOLVER_HPP_

#include <chrono>
#include <vector>

#include "ppmc/matrix.hpp"

namespace ppmc {

struct SolverConfig {
  Index rank = 1;
  double mu0 = 1.0;
  double rho = 1.5;
  double eps = 1e-24;  // threshold on the squared Frobenius step
  int max_iters = 100;
};

/// Thrown when an iterate leaves the representable range (e.g. the penalty
/// growth overflows on an infeasible configuration).
struct SolverDivergence : std::runtime_error {
  int iteration;
  explicit SolverDivergence(int iter)
      : std::runtime_error("solver iterate became non-finite at iteration " +
                           std::to_string(iter)),
        iteration(iter) {}
};

struct TriFactor {
  Matrix lf;  // S x r, column-orthogonal
  Matrix dc;  // r x r core
  Matrix rf;  // r x T, row-orthogonal
};

struct SolverState {
  Matrix x;
  Matrix y;
  double mu = 1.0;
  TriFactor factors;
  int iter = 0;
  double last_step_sq = 0.0;
};

struct CompletionResult {
  Matrix recovered;
  int iterations_run = 0;
  std::vector<double> step_history;  // squared Frobenius step per iteration
  double wall_time = 0.0;            // seconds spent in the iteration loop
};

// ---------------------------------------------------------------------------
// Modular ADMM steps (reference path; pplnm_qr below runs an algebraically
// equivalent loop restricted to the observed support).
// ---------------------------------------------------------------------------

inline SolverState init_state(const Matrix& m_enc, const ObservationMask& mask,
                              const SolverConfig& cfg) {
  require_same_shape(m_enc, mask.bits(), "init_state");
  const Index s = m_enc.rows(), t = m_enc.cols();
  if (cfg.rank < 1 || cfg.rank > std::min(s, t))
    throw std::domain_error("init_state: rank out of range");
  SolverState st;
  st.x = m_enc;
  st.y = Matrix::Zero(s, t);
  st.mu = cfg.mu0;
  st.factors.lf = Matrix::Identity(s, cfg.rank);
  st.factors.dc = Matrix::Identity(cfg.rank, cfg.rank);
  st.factors.rf = Matrix::Identity(cfg.rank, t);
  return st;
}

/// Refresh L and R from QR factorizations of the penalized iterate
/// W = X + Y/mu; leaves the raw (unshrunk) core D_T in factors.dc.
inline void update_factors(SolverState& st) {
  const Matrix w = st.x + st.y / st.mu;
  st.factors.lf = qr_thin(w * st.factors.rf.transpose()).q;
  QrThin right = qr_thin(w.transpose() * st.factors.lf);
  st.factors.rf = right.q.transpose();
  st.factors.dc = right.rtri.transpose();
}

/// Column-wise soft threshold at 1/mu: columns with norm below the threshold
/// vanish, the rest shrink radially.
inline Matrix shrink_columns(const Matrix& dt, double mu) {
  if (!(mu > 0.0)) throw std::domain_error("shrink_columns: mu must be > 0");
  const double threshold = 1.0 / mu;
  Matrix out = dt;
  for (Index j = 0; j < dt.cols(); ++j) {
    const double c = dt.col(j).norm();
    if (c <= threshold)
      out.col(j).setZero();
    else
      out.col(j) *= (c - threshold) / c;
  }
  return out;
}

/// Hard data constraint: the low-rank product everywhere, overwritten by the
/// observed entries of m_enc on the support.
inline void update_x(SolverState& st, const Matrix& m_enc,
                     const ObservationMask& mask) {
  const Matrix z = st.factors.lf * st.factors.dc * st.factors.rf;
  const Matrix x_next = z - hadamard(mask.bits(), z) + m_enc;
  st.last_step_sq = (st.x - x_next).squaredNorm();
  st.x = x_next;
}

inline void update_y_mu(SolverState& st, double rho) {
  const Matrix z = st.factors.lf * st.factors.dc * st.factors.rf;
  st.y += st.mu * (st.x - z);
  st.mu *= rho;
  ++st.iter;
}

// ---------------------------------------------------------------------------
// PPLNM-QR driver.
//
// Because X is pinned to m_enc on the support and Y starts at zero, Y stays
// supported on the mask and X equals the current product Z off the support.
// With R row-orthonormal, W*R^T collapses to L*D plus a support-restricted
// correction, so each iteration only needs per-entry work on the matrix plus
// O((S+T) r^2) dense work on the thin factors.
// ---------------------------------------------------------------------------

namespace detail {

using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Row-compressed views of the observed and missing entry sets.
struct SupportIndex {
  std::vector<int> obs_ptr, obs_col;
  std::vector<double> obs_val;  // m_enc at observed entries
  std::vector<int> off_ptr, off_col;

  SupportIndex(const Matrix& m_enc, const ObservationMask& mask) {
    const Index s = m_enc.rows(), t = m_enc.cols();
    obs_ptr.assign(static_cast<std::size_t>(s) + 1, 0);
    off_ptr.assign(static_cast<std::size_t>(s) + 1, 0);
    for (Index i = 0; i < s; ++i) {
      for (Index j = 0; j < t; ++j) {
        if (mask.bits()(i, j) != 0.0) {
          obs_col.push_back(static_cast<int>(j));
          obs_val.push_back(m_enc(i, j));
        } else {
          off_col.push_back(static_cast<int>(j));
        }
      }
      obs_ptr[static_cast<std::size_t>(i) + 1] =
          static_cast<int>(obs_col.size());
      off_ptr[static_cast<std::size_t>(i) + 1] =
          static_cast<int>(off_col.size());
    }
  }
};

}  // namespace detail

inline CompletionResult pplnm_qr(const Matrix& m_enc,
                                 const ObservationMask& mask,
                                 const SolverConfig& cfg) {
  require_same_shape(m_enc, mask.bits(), "pplnm_qr");
  const Index s = m_enc.rows(), t = m_enc.cols(), r = cfg.rank;
  if (r < 1 || r > std::min(s, t))
    throw std::domain_error("pplnm_qr: rank out of range");

  const detail::SupportIndex sup(m_enc, mask);
  const std::size_t nobs = sup.obs_val.size();
  const std::size_t noff = sup.off_col.size();

  using detail::RowMat;
  RowMat lf = RowMat::Identity(s, r);        // L
  Matrix dc = Matrix::Identity(r, r);        // D (shrunk core)
  RowMat rt = RowMat::Identity(t, r);        // R^T
  RowMat ld = lf * dc;                       // L*D cache
  RowMat b1(s, r), b2(t, r);

  std::vector<double> y(nobs, 0.0);    // multiplier on the support
  std::vector<double> c(nobs);         // support correction of W
  std::vector<double> z_obs(nobs, 0.0);
  std::vector<double> x_off(noff, 0.0);  // X off the support (zero at start)
  bool have_product = false;  // X_off/z_obs describe L*D*R only after iter 0

  CompletionResult result;
  result.step_history.reserve(static_cast<std::size_t>(cfg.max_iters));
  double mu = cfg.mu0;

  const auto t_begin = std::chrono::steady_clock::now();
  for (int k = 0; k < cfg.max_iters; ++k) {
    // B1 = W * R^T. The product part Z*R^T equals L*D; the support part is
    // the scatter of c = m - z + y/mu.
    b1 = have_product ? ld : RowMat::Zero(s, r).eval();
    for (Index i = 0; i < s; ++i) {
      const int begin = sup.obs_ptr[static_cast<std::size_t>(i)];
      const int end = sup.obs_ptr[static_cast<std::size_t>(i) + 1];
      auto b1_row = b1.row(i);
      for (int p = begin; p < end; ++p) {
        const double cp = sup.obs_val[static_cast<std::size_t>(p)] -
                          z_obs[static_cast<std::size_t>(p)] +
                          y[static_cast<std::size_t>(p)] / mu;
        c[static_cast<std::size_t>(p)] = cp;
        b1_row += cp * rt.row(sup.obs_col[static_cast<std::size_t>(p)]);
      }
    }
    const QrThin left = qr_thin(b1);
    const RowMat lf_next = left.q;

    // B2 = W^T * L_next = R^T * (D^T * (L^T * L_next)) + scatter of c.
    if (have_product) {
      const Matrix small = dc.transpose() * (lf.transpose() * lf_next);
      b2.noalias() = rt * small;
    } else {
      b2.setZero();
    }
    for (Index i = 0; i < s; ++i) {
      const int begin = sup.obs_ptr[static_cast<std::size_t>(i)];
      const int end = sup.obs_ptr[static_cast<std::size_t>(i) + 1];
      const auto l_row = lf_next.row(i);
      for (int p = begin; p < end; ++p)
        b2.row(sup.obs_col[static_cast<std::size_t>(p)]) +=
            c[static_cast<std::size_t>(p)] * l_row;
    }
    const QrThin right = qr_thin(b2);
    lf = lf_next;
    rt = right.q;
    dc = shrink_columns(right.rtri.transpose(), mu);
    ld.noalias() = lf * dc;
    have_product = true;

    // X update on the support is the pinned data (zero step there); off the
    // support X becomes the fresh product. Y accumulates the residual, which
    // also lives on the support only.
    double step_sq = 0.0;
    double extreme = 0.0;
    for (Index i = 0; i < s; ++i) {
      const auto ld_row = ld.row(i);
      for (int p = sup.obs_ptr[static_cast<std::size_t>(i)];
           p < sup.obs_ptr[static_cast<std::size_t>(i) + 1]; ++p) {
        const double z = ld_row.dot(rt.row(sup.obs_col[static_cast<std::size_t>(p)]));
        z_obs[static_cast<std::size_t>(p)] = z;
        y[static_cast<std::size_t>(p)] +=
            mu * (sup.obs_val[static_cast<std::size_t>(p)] - z);
        extreme = std::max(extreme, std::abs(y[static_cast<std::size_t>(p)]));
      }
      for (int p = sup.off_ptr[static_cast<std::size_t>(i)];
           p < sup.off_ptr[static_cast<std::size_t>(i) + 1]; ++p) {
        const double z = ld_row.dot(rt.row(sup.off_col[static_cast<std::size_t>(p)]));
        const double d = z - x_off[static_cast<std::size_t>(p)];
        step_sq += d * d;
        x_off[static_cast<std::size_t>(p)] = z;
        extreme = std::max(extreme, std::abs(z));
      }
    }
    if (!std::isfinite(step_sq) || extreme > 1e100)
      throw SolverDivergence(k);

    result.step_history.push_back(step_sq);
    ++result.iterations_run;
    mu *= cfg.rho;
    if (step_sq < cfg.eps) break;
  }
  const auto t_end = std::chrono::steady_clock::now();
  result.wall_time = std::chrono::duration<double>(t_end - t_begin).count();

  Matrix x(s, t);
  for (Index i = 0; i < s; ++i) {
    for (int p = sup.obs_ptr[static_cast<std::size_t>(i)];
         p < sup.obs_ptr[static_cast<std::size_t>(i) + 1]; ++p)
      x(i, sup.obs_col[static_cast<std::size_t>(p)]) =
          sup.obs_val[static_cast<std::size_t>(p)];
    for (int p = sup.off_ptr[static_cast<std::size_t>(i)];
         p < sup.off_ptr[static_cast<std::size_t>(i) + 1]; ++p)
      x(i, sup.off_col[static_cast<std::size_t>(p)]) =
          x_off[static_cast<std::size_t>(p)];
  }
  result.recovered = std::move(x);
  return result;
}

// ---------------------------------------------------------------------------
// Truncated SVD and the ALT-MIN baseline.
// ---------------------------------------------------------------------------

struct SvdTopK {
  Matrix u;      // S x k
  Vector sigma;  // k, nonincreasing
  Matrix v;      // T x k
};

inline SvdTopK svd_topk(const Matrix& a, Index k) {
  if (k < 1 || k > std::min(a.rows(), a.cols()))
    throw std::domain_error("svd_topk: k out of range");
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdTopK out;
  out.u = svd.matrixU().leftCols(k);
  out.sigma = svd.singularValues().head(k);
  out.v = svd.matrixV().leftCols(k);
  return out;
}

/// Alternating minimization on the observed entries: spectral initialization
/// of U, then exact per-column / per-row least squares, with a small ridge
/// added when a normal system is singular.
inline CompletionResult alt_min(const Matrix& m_enc,
                                const ObservationMask& mask,
                                const SolverConfig& cfg) {
  require_same_shape(m_enc, mask.bits(), "alt_min");
  const Index s = m_enc.rows(), t = m_enc.cols(), r = cfg.rank;
  if (r < 1 || r > std::min(s, t))
    throw std::domain_error("alt_min: rank out of range");
  constexpr double kRidge = 1e-12;

  const SvdTopK init = svd_topk(m_enc, r);
  Matrix u = init.u * init.sigma.asDiagonal();
  Matrix v = Matrix::Zero(r, t);
  Matrix x_prev = m_enc;

  const auto solve_normal = [&](const Matrix& gram, const Vector& rhs) {
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() == Eigen::Success) {
      Vector sol = llt.solve(rhs);
      if (sol.allFinite()) return sol;
    }
    Matrix ridged = gram + kRidge * Matrix::Identity(r, r);
    return Vector(Eigen::LDLT<Matrix>(ridged).solve(rhs));
  };

  CompletionResult result;
  const auto t_begin = std::chrono::steady_clock::now();
  for (int k = 0; k < cfg.max_iters; ++k) {
    for (Index j = 0; j < t; ++j) {
      Matrix gram = Matrix::Zero(r, r);
      Vector rhs = Vector::Zero(r);
      for (Index i = 0; i < s; ++i) {
        if (mask.bits()(i, j) == 0.0) continue;
        const auto row = u.row(i);
        gram.noalias() += row.transpose() * row;
        rhs.noalias() += m_enc(i, j) * row.transpose();
      }
      v.col(j) = solve_normal(gram, rhs);
    }
    for (Index i = 0; i < s; ++i) {
      Matrix gram = Matrix::Zero(r, r);
      Vector rhs = Vector::Zero(r);
      for (Index j = 0; j < t; ++j) {
        if (mask.bits()(i, j) == 0.0) continue;
        const auto col = v.col(j);
        gram.noalias() += col * col.transpose();
        rhs.noalias() += m_enc(i, j) * col;
      }
      u.row(i) = solve_normal(gram, rhs).transpose();
    }
    Matrix x = u * v;
    if (!x.allFinite()) throw SolverDivergence(k);
    const double step_sq = (x - x_prev).squaredNorm();
    x_prev = std::move(x);
    result.step_history.push_back(step_sq);
    ++result.iterations_run;
    if (step_sq < cfg.eps) break;
  }
  const auto t_end = std::chrono::steady_clock::now();
  result.wall_time = std::chrono::duration<double>(t_end - t_begin).count();

  result.recovered =
      x_prev - hadamard(mask.bits(), x_prev) + m_enc;
  return result;
}

}  // namespace ppmc

#endif  // PPMC_SOLVER_HPP_
