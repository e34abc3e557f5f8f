#include "deltaf/manifold.hpp"

#include <string>

namespace deltaf::nl {

BlockDiagonal::BlockDiagonal(std::vector<DenseMatrix> blocks) : blocks_(std::move(blocks)) {
  offsets_.reserve(blocks_.size());
  for (const auto& b : blocks_) {
    require_square(b, "diagonal block");
    offsets_.push_back(dim_);
    dim_ += b.rows();
  }
}

BlockDiagonal BlockDiagonal::identity(const std::vector<Eigen::Index>& sizes) {
  std::vector<DenseMatrix> blocks;
  blocks.reserve(sizes.size());
  for (const Eigen::Index s : sizes) blocks.push_back(DenseMatrix::Identity(s, s));
  return BlockDiagonal(std::move(blocks));
}

std::vector<Eigen::Index> BlockDiagonal::sizes() const {
  std::vector<Eigen::Index> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) out.push_back(b.rows());
  return out;
}

DenseMatrix BlockDiagonal::dense() const {
  DenseMatrix out = DenseMatrix::Zero(dim_, dim_);
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    out.block(offsets_[k], offsets_[k], blocks_[k].rows(), blocks_[k].cols()) = blocks_[k];
  }
  return out;
}

DenseVector BlockDiagonal::operator*(const Eigen::Ref<const DenseVector>& v) const {
  if (v.size() != dim_) throw Error(ErrorCode::kDimensionMismatch, "block-diagonal product: size mismatch");
  DenseVector out(dim_);
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const Eigen::Index sz = blocks_[k].rows();
    out.segment(offsets_[k], sz) = blocks_[k] * v.segment(offsets_[k], sz);
  }
  return out;
}

DenseMatrix BlockDiagonal::multiply(const Eigen::Ref<const DenseMatrix>& rhs) const {
  if (rhs.rows() != dim_) throw Error(ErrorCode::kDimensionMismatch, "block-diagonal product: size mismatch");
  DenseMatrix out(dim_, rhs.cols());
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const Eigen::Index sz = blocks_[k].rows();
    out.middleRows(offsets_[k], sz) = blocks_[k] * rhs.middleRows(offsets_[k], sz);
  }
  return out;
}

BlockDiagonal BlockDiagonal::operator*(const BlockDiagonal& other) const {
  if (sizes() != other.sizes()) {
    throw Error(ErrorCode::kDimensionMismatch, "block-diagonal product: partitions differ");
  }
  std::vector<DenseMatrix> out;
  out.reserve(blocks_.size());
  for (std::size_t k = 0; k < blocks_.size(); ++k) out.push_back(blocks_[k] * other.blocks_[k]);
  return BlockDiagonal(std::move(out));
}

BlockDiagonal BlockDiagonal::transpose() const {
  std::vector<DenseMatrix> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) out.push_back(b.transpose());
  return BlockDiagonal(std::move(out));
}

BlockDiagonal BlockDiagonal::inverse() const {
  std::vector<DenseMatrix> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) {
    Eigen::FullPivLU<DenseMatrix> lu(b);
    if (!lu.isInvertible()) throw Error(ErrorCode::kSingularH, "singular diagonal block");
    out.push_back(lu.inverse());
  }
  return BlockDiagonal(std::move(out));
}

BlockDiagonal EuclideanSpace::local_jacobian(const Point& a, const Point& /*b*/) const {
  if (block_sizes.empty()) return BlockDiagonal::identity({a.size()});
  return BlockDiagonal::identity(block_sizes);
}

PoseProductSpace::Point PoseProductSpace::retract(const Point& p, const DenseVector& xi) const {
  if (xi.size() != dim(p)) throw Error(ErrorCode::kDimensionMismatch, "tangent vector size mismatch");
  Point out;
  out.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    out.push_back(se3::boxplus(p[i], se3::Twist(se3::Vector6d(xi.segment<6>(6 * i)))));
  }
  return out;
}

DenseVector PoseProductSpace::local(const Point& a, const Point& b) const {
  if (a.size() != b.size()) throw Error(ErrorCode::kDimensionMismatch, "pose product size mismatch");
  DenseVector out(dim(a));
  for (std::size_t i = 0; i < a.size(); ++i) out.segment<6>(6 * i) = se3::boxminus(a[i], b[i]).vector();
  return out;
}

BlockDiagonal PoseProductSpace::local_jacobian(const Point& a, const Point& b) const {
  if (a.size() != b.size()) throw Error(ErrorCode::kDimensionMismatch, "pose product size mismatch");
  std::vector<DenseMatrix> blocks;
  blocks.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    blocks.emplace_back(se3::left_jacobian_inv(se3::boxminus(a[i], b[i])));
  }
  return BlockDiagonal(std::move(blocks));
}

namespace detail {

Weight factor_weight(const BlockDiagonal& sigma) {
  Weight w;
  w.offsets = sigma.offsets();
  w.factors.reserve(sigma.blocks().size());
  for (const auto& b : sigma.blocks()) w.factors.push_back(factor_spd(b));
  return w;
}

double weighted_norm(const Weight& w, const Eigen::Ref<const DenseVector>& r) {
  double total = 0.0;
  for (std::size_t k = 0; k < w.factors.size(); ++k) {
    const auto& llt = w.factors[k];
    const DenseVector z = llt.matrixL().solve(r.segment(w.offsets[k], llt.rows()));
    total += z.squaredNorm();
  }
  return total;
}

Step solve_linearized(const BlockDiagonal& h_mat, const BlockDiagonal& sigma, const DenseVector& h,
                      const DenseMatrix& a, const DenseVector& b, bool want_q) {
  const BlockDiagonal h_inv = h_mat.inverse();
  const BlockDiagonal q = h_inv * sigma * h_inv.transpose();

  Step step;
  const DenseVector xi0 = h_inv * h;
  if (a.rows() == 0) {
    step.xi = xi0;
    step.multipliers = DenseVector(0);
  } else {
    step.q_at = q.multiply(a.transpose());
    step.s.compute(a * step.q_at);
    if (step.s.info() != Eigen::Success) {
      throw Error(ErrorCode::kRankDeficient, "linearized constraints are rank deficient");
    }
    const DenseVector nu = step.s.solve(b - a * xi0);
    step.xi = xi0 + step.q_at * nu;
    step.multipliers = 2.0 * nu;
  }
  if (want_q) step.q = q.dense();
  return step;
}

}  // namespace detail

LDPhaseSolution to_ld_solution(const NLPhaseSolution<DenseVector>& sol) {
  LDPhaseSolution out;
  out.x_star = sol.x_star;
  out.cov = sol.cov;
  out.f_star = sol.f_star;
  return out;
}

}  // namespace deltaf::nl
