#pragma once

#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "deltaf/error.hpp"

namespace deltaf {

using DenseMatrix = Eigen::MatrixXd;
using DenseVector = Eigen::VectorXd;

/// Throws kNonFinite if any entry is NaN or Inf. `what` names the argument.
void require_finite(const Eigen::Ref<const DenseMatrix>& m, std::string_view what);

/// Throws kDimensionMismatch unless m is square.
void require_square(const Eigen::Ref<const DenseMatrix>& m, std::string_view what);

/// Relative symmetry check: max|M - M^T| <= tol * max(1, max|M|).
bool is_symmetric(const Eigen::Ref<const DenseMatrix>& m, double rel_tol = 1e-12);

/// Cholesky factor of an SPD matrix; throws kNotSPD on symmetry failure or a
/// non-positive pivot.
Eigen::LLT<DenseMatrix> factor_spd(const Eigen::Ref<const DenseMatrix>& m);

/// Solves M X = rhs for symmetric positive definite M.
DenseMatrix solve_spd(const Eigen::Ref<const DenseMatrix>& m, const Eigen::Ref<const DenseMatrix>& rhs);

/// Symmetric S with S * S = M for SPD M (eigen-decomposition based).
DenseMatrix symmetric_sqrt(const Eigen::Ref<const DenseMatrix>& m);

/// Number of singular values strictly above `tol`. With no tolerance the
/// cutoff is max(rows, cols) * eps * sigma_max.
Eigen::Index numerical_rank(const Eigen::Ref<const DenseMatrix>& m, std::optional<double> tol = std::nullopt);

struct SchurFactors {
  DenseMatrix lower;       // [[I, 0], [Q U^-1, I]]
  DenseMatrix block_diag;  // [[U, 0], [0, V - Q U^-1 P]]
  DenseMatrix upper;       // [[I, U^-1 P], [0, I]]
};

/// Block LDU factorization of [[U, P], [Q, V]] around the Schur complement of U.
/// Throws kSingularBlock when U is not invertible at working precision.
SchurFactors schur_decompose(const Eigen::Ref<const DenseMatrix>& u, const Eigen::Ref<const DenseMatrix>& p,
                             const Eigen::Ref<const DenseMatrix>& q, const Eigen::Ref<const DenseMatrix>& v);

/// Projects onto the nearest rotation (polar factor of the SVD).
Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m);

}  // namespace deltaf
