#include "deltaf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace deltaf {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kNotSPD: return "NotSPD";
    case ErrorCode::kSingularBlock: return "SingularBlock";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kSingularW: return "SingularW";
    case ErrorCode::kSingularH: return "SingularH";
    case ErrorCode::kNearPiRotation: return "NearPiRotation";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kEvaluationFailure: return "EvaluationFailure";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

void require_finite(const Eigen::Ref<const DenseMatrix>& m, std::string_view what) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::kNonFinite, std::string(what) + " contains NaN or Inf");
  }
}

void require_square(const Eigen::Ref<const DenseMatrix>& m, std::string_view what) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, std::string(what) + " must be square, got " +
                                                   std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

bool is_symmetric(const Eigen::Ref<const DenseMatrix>& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

Eigen::LLT<DenseMatrix> factor_spd(const Eigen::Ref<const DenseMatrix>& m) {
  require_square(m, "SPD matrix");
  require_finite(m, "SPD matrix");
  if (!is_symmetric(m)) {
    throw Error(ErrorCode::kNotSPD, "matrix is not symmetric");
  }
  Eigen::LLT<DenseMatrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kNotSPD, "Cholesky factorization hit a non-positive pivot");
  }
  return llt;
}

DenseMatrix solve_spd(const Eigen::Ref<const DenseMatrix>& m, const Eigen::Ref<const DenseMatrix>& rhs) {
  if (rhs.rows() != m.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "solve_spd: rhs has " + std::to_string(rhs.rows()) +
                                                   " rows, matrix has " + std::to_string(m.rows()));
  }
  require_finite(rhs, "rhs");
  return factor_spd(m).solve(rhs);
}

DenseMatrix symmetric_sqrt(const Eigen::Ref<const DenseMatrix>& m) {
  require_square(m, "symmetric_sqrt input");
  require_finite(m, "symmetric_sqrt input");
  if (!is_symmetric(m)) {
    throw Error(ErrorCode::kNotSPD, "symmetric_sqrt: matrix is not symmetric");
  }
  const DenseMatrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::kNotSPD, "symmetric_sqrt: eigen-decomposition failed");
  }
  const Eigen::VectorXd& w = eig.eigenvalues();
  if (w.size() > 0 && w.minCoeff() <= 0.0) {
    throw Error(ErrorCode::kNotSPD, "symmetric_sqrt: matrix has a non-positive eigenvalue");
  }
  const DenseMatrix& v = eig.eigenvectors();
  DenseMatrix s = v * w.cwiseSqrt().asDiagonal() * v.transpose();
  return 0.5 * (s + s.transpose());
}

Eigen::Index numerical_rank(const Eigen::Ref<const DenseMatrix>& m, std::optional<double> tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<DenseMatrix> svd(m);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = tol.value_or(static_cast<double>(std::max(m.rows(), m.cols())) *
                                     std::numeric_limits<double>::epsilon() * sv(0));
  return static_cast<Eigen::Index>((sv.array() > cutoff).count());
}

SchurFactors schur_decompose(const Eigen::Ref<const DenseMatrix>& u, const Eigen::Ref<const DenseMatrix>& p,
                             const Eigen::Ref<const DenseMatrix>& q, const Eigen::Ref<const DenseMatrix>& v) {
  require_square(u, "U");
  require_square(v, "V");
  const Eigen::Index k = u.rows();
  const Eigen::Index m = v.rows();
  if (p.rows() != k || p.cols() != m || q.rows() != m || q.cols() != k) {
    throw Error(ErrorCode::kDimensionMismatch, "schur_decompose: blocks are not conformal");
  }
  for (const auto* block : {&u, &p, &q, &v}) require_finite(*block, "Schur block");

  Eigen::FullPivLU<DenseMatrix> lu(u);
  if (k > 0 && !lu.isInvertible()) {
    throw Error(ErrorCode::kSingularBlock, "schur_decompose: U is singular");
  }
  const DenseMatrix u_inv_p = k > 0 ? DenseMatrix(lu.solve(p)) : DenseMatrix::Zero(0, m);
  // Q U^-1 = (U^-T Q^T)^T
  const DenseMatrix q_u_inv =
      k > 0 ? DenseMatrix(Eigen::FullPivLU<DenseMatrix>(u.transpose()).solve(q.transpose()).transpose())
            : DenseMatrix::Zero(m, 0);

  const Eigen::Index n = k + m;
  SchurFactors f;
  f.lower = DenseMatrix::Identity(n, n);
  f.lower.bottomLeftCorner(m, k) = q_u_inv;
  f.block_diag = DenseMatrix::Zero(n, n);
  f.block_diag.topLeftCorner(k, k) = u;
  f.block_diag.bottomRightCorner(m, m) = v - q * u_inv_p;
  f.upper = DenseMatrix::Identity(n, n);
  f.upper.topRightCorner(k, m) = u_inv_p;
  return f;
}

Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

}  // namespace deltaf
