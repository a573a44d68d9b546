#include "bmforge/minsecant.hpp"

#include "bmforge/manifold.hpp"

#include <Eigen/SVD>

namespace bmforge {

namespace {

int svd_rank(const Matrix& M, double rel_tol) {
  if (M.cols() == 0 || M.rows() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(M);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  return static_cast<int>((s.array() > rel_tol * s(0)).count());
}

}  // namespace

MinSecantReport check_min_secant(const SdpInstance& inst,
                                 const GroundTruth& truth, const Matrix& V,
                                 const Tolerances& tols) {
  if (V.rows() != inst.n)
    throw DimensionMismatch("check_min_secant: factor row count mismatch");
  const int p = static_cast<int>(V.cols());
  const int r = truth.r;

  MinSecantReport rep;
  rep.tolerance = tols.basis_rank_rel;
  rep.target_dim = p * (p - 1) / 2;
  rep.rank_V = svd_rank(V, tols.basis_rank_rel);
  rep.property1 = rep.rank_V == p;

  Matrix joint(inst.n, r + p);
  joint.leftCols(r) = truth.U0;
  joint.rightCols(p) = V;
  rep.joint_rank = svd_rank(joint, tols.basis_rank_rel);
  rep.property2 = rep.joint_rank == r + p;

  // Throws NotRegular when the tangent dimension is ill-defined.
  const TangentBasis tb = tangent_basis(inst, V, tols);
  rep.tangent_dim = tb.dim();

  // S = {D : Range(D) within Range(X0) + Range(V)}: orthonormal basis
  // Q e_a e_b^T, i.e. block-diagonal placement of Q's columns.
  Eigen::JacobiSVD<Matrix> jsvd(joint, Eigen::ComputeThinU);
  const int k = rep.joint_rank;
  const Matrix Q = jsvd.matrixU().leftCols(k);
  Matrix S_basis = Matrix::Zero(inst.n * p, k * p);
  for (int b = 0; b < p; ++b)
    S_basis.block(b * inst.n, b * k, inst.n, k) = Q;

  Matrix stacked(inst.n * p, tb.dim() + k * p);
  stacked.leftCols(tb.dim()) = tb.tangent;
  stacked.rightCols(k * p) = S_basis;
  const int stacked_rank = svd_rank(stacked, tols.basis_rank_rel);
  rep.range_constrained_dim = tb.dim() + k * p - stacked_rank;
  rep.property3 = rep.range_constrained_dim == rep.target_dim;
  rep.verdict = rep.property1 && rep.property2 && rep.property3;
  return rep;
}

DimensionForecast dimension_predictor(long n, long m, long p, long r) {
  if (n < 1 || m < 1 || p < 1 || r < 1)
    throw DimensionMismatch("dimension_predictor: arguments must be positive");
  DimensionForecast f;
  f.slack = m - p * (p + 1) / 2 - p * r;
  f.feasible = f.slack >= 0;
  return f;
}

}  // namespace bmforge
