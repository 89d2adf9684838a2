#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "normprop/errors.hpp"
#include "normprop/spectral.hpp"

namespace normprop {

namespace {

using cd = std::complex<double>;
using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// Swaps diagonal entries kk and kk + 1 of the upper triangular T by a unitary
// rotation, accumulating it into Q (same construction as LAPACK ztrexc).
void swap_adjacent(MatrixXcd& t, MatrixXcd& q, Index kk) {
  const Index n = t.rows();
  const cd t11 = t(kk, kk);
  const cd t22 = t(kk + 1, kk + 1);
  const cd f = t(kk, kk + 1);
  const cd g = t22 - t11;
  double cs = 1.0;
  cd sn = 0.0;
  if (std::abs(g) == 0.0) {
    return;
  } else if (std::abs(f) == 0.0) {
    cs = 0.0;
    sn = std::conj(g) / std::abs(g);
  } else {
    const double norm = std::hypot(std::abs(f), std::abs(g));
    cs = std::abs(f) / norm;
    sn = (f / std::abs(f)) * std::conj(g) / norm;
  }
  for (Index c = kk + 2; c < n; ++c) {
    const cd x = t(kk, c);
    const cd y = t(kk + 1, c);
    t(kk, c) = cs * x + sn * y;
    t(kk + 1, c) = cs * y - std::conj(sn) * x;
  }
  const auto rotate_columns = [&](MatrixXcd& m, Index rows) {
    for (Index r = 0; r < rows; ++r) {
      const cd x = m(r, kk);
      const cd y = m(r, kk + 1);
      m(r, kk) = cs * x + std::conj(sn) * y;
      m(r, kk + 1) = cs * y - sn * x;
    }
  };
  rotate_columns(t, kk);
  t(kk, kk) = t22;
  t(kk + 1, kk + 1) = t11;
  rotate_columns(q, q.rows());
}

// Orders the Schur form by descending eigenvalue modulus.
void sort_schur(MatrixXcd& t, MatrixXcd& q) {
  const Index n = t.rows();
  for (Index i = 0; i < n; ++i) {
    Index best = i;
    for (Index j = i + 1; j < n; ++j) {
      if (std::abs(t(j, j)) > std::abs(t(best, best))) best = j;
    }
    for (Index j = best; j > i; --j) swap_adjacent(t, q, j - 1);
  }
}

// Eigenvector of the upper triangular T for its i-th diagonal entry, unit norm.
VectorXcd triangular_eigenvector(const MatrixXcd& t, Index i) {
  VectorXcd y = VectorXcd::Zero(t.rows());
  y(i) = 1.0;
  const cd lambda = t(i, i);
  const double guard = 1e-14 * std::max(1.0, std::abs(lambda));
  for (Index r = i - 1; r >= 0; --r) {
    cd acc = 0.0;
    for (Index c = r + 1; c <= i; ++c) acc += t(r, c) * y(c);
    cd denom = t(r, r) - lambda;
    if (std::abs(denom) < guard) denom = guard;
    y(r) = -acc / denom;
  }
  return y / y.norm();
}

class Operator {
 public:
  Operator(std::size_t dim, const LinearMap& apply) : apply_(apply), re_(dim), im_(dim), out_re_(dim), out_im_(dim) {}

  VectorXcd operator()(const VectorXcd& x) {
    for (Index i = 0; i < x.size(); ++i) {
      re_[i] = x(i).real();
      im_[i] = x(i).imag();
    }
    apply_(re_, out_re_);
    apply_(im_, out_im_);
    VectorXcd y(x.size());
    for (Index i = 0; i < x.size(); ++i) y(i) = cd(out_re_[i], out_im_[i]);
    return y;
  }

 private:
  const LinearMap& apply_;
  std::vector<double> re_, im_, out_re_, out_im_;
};

VectorXcd random_unit(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  VectorXcd v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = normal(rng);
  return v / v.norm();
}

// Orthogonalizes w against the first `count` columns of v, twice (CGS2).
VectorXcd orthogonalize(const MatrixXcd& v, Index count, VectorXcd& w) {
  VectorXcd h = v.leftCols(count).adjoint() * w;
  w.noalias() -= v.leftCols(count) * h;
  const VectorXcd h2 = v.leftCols(count).adjoint() * w;
  w.noalias() -= v.leftCols(count) * h2;
  return h + h2;
}

}  // namespace

std::vector<EigenPair> leading_eigenpairs(std::size_t dim, const LinearMap& apply, std::size_t top_k,
                                          const KrylovOptions& options) {
  if (dim == 0) throw DomainError("operator dimension must be positive");
  if (top_k == 0 || top_k > dim) throw DomainError("top_k must be in [1, dim]");
  const auto n = static_cast<Index>(dim);
  const auto k = static_cast<Index>(top_k);
  Index m = options.subspace != 0 ? static_cast<Index>(options.subspace) : std::max(2 * k + 1, k + 24);
  m = std::min(m, n);
  if (m < k) throw DomainError("Krylov subspace smaller than top_k");

  Operator op(dim, apply);
  std::mt19937_64 rng(options.seed);
  MatrixXcd v = MatrixXcd::Zero(n, m + 1);
  MatrixXcd h = MatrixXcd::Zero(m + 1, m);
  v.col(0) = random_unit(n, rng);

  MatrixXcd t;
  MatrixXcd q;
  Index filled = 0;
  double worst = 0.0;
  for (std::size_t restart = 0;; ++restart) {
    for (Index j = filled; j < m; ++j) {
      VectorXcd w = op(v.col(j));
      const double w_norm = w.norm();
      h.col(j).head(j + 1) = orthogonalize(v, j + 1, w);
      double beta = w.norm();
      if (beta <= 1e-12 * std::max(w_norm, 1e-300)) {
        // Invariant subspace found: continue from a fresh orthogonal direction.
        beta = 0.0;
        if (j + 1 < n) {
          w = random_unit(n, rng);
          orthogonalize(v, j + 1, w);
          w /= w.norm();
        } else {
          w.setZero();
        }
        v.col(j + 1) = w;
      } else {
        v.col(j + 1) = w / beta;
      }
      h(j + 1, j) = beta;
    }

    Eigen::ComplexSchur<MatrixXcd> schur(h.topRows(m));
    if (schur.info() != Eigen::Success) throw ConvergenceError("Schur decomposition failed", -1.0);
    t = schur.matrixT();
    q = schur.matrixU();
    sort_schur(t, q);
    const Eigen::RowVectorXcd bq = h.row(m) * q;

    const double scale = std::max(std::abs(t(0, 0)), 1e-300);
    worst = 0.0;
    for (Index i = 0; i < k; ++i) {
      const VectorXcd y = triangular_eigenvector(t, i);
      worst = std::max(worst, std::abs(bq.head(i + 1).transpose().cwiseProduct(y.head(i + 1)).sum()) / scale);
    }
    if (worst <= options.tolerance || m == n || restart + 1 >= options.max_restarts) break;

    // Keep the leading half of the Schur basis and restart the expansion after it.
    const Index keep = std::min(m - 1, k + (m - k) / 2);
    const MatrixXcd kept = v.leftCols(m) * q.leftCols(keep);
    v.leftCols(keep) = kept;
    v.col(keep) = v.col(m);
    h.setZero();
    h.topLeftCorner(keep, keep) = t.topLeftCorner(keep, keep);
    h.row(keep).head(keep) = bq.head(keep);
    filled = keep;
  }

  std::vector<EigenPair> pairs;
  double max_residual = 0.0;
  for (Index i = 0; i < k; ++i) {
    VectorXcd x = v.leftCols(m) * (q * triangular_eigenvector(t, i));
    x /= x.norm();
    const cd lambda = t(i, i);
    const double residual = (op(x) - lambda * x).norm();
    max_residual = std::max(max_residual, residual);
    pairs.push_back({lambda, std::vector<cd>(x.begin(), x.end()), residual});
  }
  if (max_residual > options.max_residual) {
    throw ConvergenceError("Krylov-Schur did not converge (Ritz estimate " + std::to_string(worst) +
                               ", worst residual " + std::to_string(max_residual) + ")",
                           max_residual);
  }
  return pairs;
}

}  // namespace normprop
