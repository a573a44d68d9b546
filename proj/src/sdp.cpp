#include "bmforge/sdp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>

namespace bmforge {

SymMatrix SymMatrix::from(const Matrix& raw) {
  if (raw.rows() != raw.cols())
    throw DimensionMismatch("symmetric matrix must be square, got " +
                            std::to_string(raw.rows()) + "x" +
                            std::to_string(raw.cols()));
  if (!raw.allFinite()) throw Error("symmetric matrix has non-finite entries");
  SymMatrix s;
  const double asym = (raw - raw.transpose()).norm();
  s.asymmetry = asym / std::max(1.0, raw.norm());
  if (s.asymmetry > 1e-12 * std::max(1.0, raw.norm()) && s.asymmetry > 1e-6)
    throw Error("matrix is far from symmetric (relative asymmetry " +
                std::to_string(s.asymmetry) + ")");
  s.mat = 0.5 * (raw + raw.transpose());
  return s;
}

std::string family_name(Family f) {
  switch (f) {
    case Family::maxcut:
      return "maxcut";
    case Family::orthocut:
      return "orthocut";
    case Family::spheres:
      return "spheres";
    default:
      return "generic";
  }
}

Family family_from_name(const std::string& name) {
  if (name == "maxcut") return Family::maxcut;
  if (name == "orthocut") return Family::orthocut;
  if (name == "spheres") return Family::spheres;
  if (name == "generic" || name.empty()) return Family::generic;
  throw Error("unknown family tag: " + name);
}

SdpInstance make_instance(const std::vector<Matrix>& A, const Vector& b,
                          Family family, std::vector<int> block_dims) {
  if (A.empty()) throw DimensionMismatch("instance needs at least one constraint");
  SdpInstance inst;
  inst.m = static_cast<int>(A.size());
  inst.n = static_cast<int>(A.front().rows());
  if (inst.n < 1) throw DimensionMismatch("instance needs order >= 1");
  if (b.size() != inst.m)
    throw DimensionMismatch("b length " + std::to_string(b.size()) +
                            " != constraint count " + std::to_string(inst.m));
  inst.A.reserve(A.size());
  for (const Matrix& Ai : A) {
    if (Ai.rows() != inst.n || Ai.cols() != inst.n)
      throw DimensionMismatch("constraint matrix order mismatch");
    inst.A.push_back(SymMatrix::from(Ai));
  }
  inst.b = b;
  inst.family = family;
  inst.block_dims = std::move(block_dims);
  if (!inst.block_dims.empty()) {
    int total = 0;
    for (int d : inst.block_dims) total += d;
    if (total != inst.n)
      throw DimensionMismatch("block_dims sum to " + std::to_string(total) +
                              ", expected " + std::to_string(inst.n));
  }
  return inst;
}

FactorPoint make_factor_point(const SdpInstance& inst, const Matrix& V,
                              const Tolerances& tols) {
  if (V.rows() != inst.n)
    throw DimensionMismatch("factor has " + std::to_string(V.rows()) +
                            " rows, instance order is " + std::to_string(inst.n));
  FactorPoint fp;
  fp.V = V;
  fp.p = static_cast<int>(V.cols());
  Eigen::JacobiSVD<Matrix> svd(V);
  const Vector& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? tols.basis_rank_rel * s(0) : 0.0;
  fp.numerical_rank = static_cast<int>((s.array() > cutoff).count());
  fp.feasibility_residual =
      (apply_A(inst, V * V.transpose()) - inst.b).cwiseAbs().maxCoeff();
  return fp;
}

Vector apply_A(const SdpInstance& inst, const Matrix& X) {
  if (X.rows() != inst.n || X.cols() != inst.n)
    throw DimensionMismatch("apply_A: X order mismatch");
  Vector out(inst.m);
  for (int i = 0; i < inst.m; ++i) out(i) = inner(inst.Ai(i), X);
  return out;
}

Matrix apply_A_adjoint(const SdpInstance& inst, const Vector& g) {
  if (g.size() != inst.m)
    throw DimensionMismatch("apply_A_adjoint: multiplier length mismatch");
  Matrix out = Matrix::Zero(inst.n, inst.n);
  for (int i = 0; i < inst.m; ++i) out += g(i) * inst.Ai(i);
  return out;
}

double objective(const Matrix& C, const Matrix& X) {
  if (C.rows() != X.rows() || C.cols() != X.cols())
    throw DimensionMismatch("objective: order mismatch");
  return inner(C, X);
}

double objective(const CostMatrix& C, const Matrix& X) {
  return objective(C.C.mat, X);
}

FeasibilityReport check_feasible(const SdpInstance& inst, const Matrix& X,
                                 double tol) {
  FeasibilityReport rep;
  rep.tol = tol;
  rep.constraint_residual = (apply_A(inst, X) - inst.b).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (X + X.transpose()),
                                            Eigen::EigenvaluesOnly);
  rep.min_eigenvalue = eig.eigenvalues().minCoeff();
  rep.feasible =
      rep.constraint_residual <= tol && rep.min_eigenvalue >= -tol;
  return rep;
}

Matrix constraint_jacobian(const SdpInstance& inst, const Matrix& V) {
  if (V.rows() != inst.n)
    throw DimensionMismatch("constraint_jacobian: row count mismatch");
  const int p = static_cast<int>(V.cols());
  Matrix J(inst.m, inst.n * p);
  for (int i = 0; i < inst.m; ++i)
    J.row(i) = vec(2.0 * inst.Ai(i) * V).transpose();
  return J;
}

RegularityReport check_p_regular(const SdpInstance& inst, const Matrix& V,
                                 const Tolerances& tols) {
  const Matrix J = constraint_jacobian(inst, V);
  Eigen::JacobiSVD<Matrix> svd(J);
  const Vector s = svd.singularValues();  // descending, min(m, np) values
  RegularityReport rep;
  rep.sigma_max = s.size() > 0 ? s(0) : 0.0;
  rep.tolerance = tols.regularity_rel * rep.sigma_max;
  // All m singular values of the m x np map; fewer exist when np < m, in
  // which case surjectivity is impossible and the missing ones are zero.
  Vector padded = Vector::Zero(inst.m);
  padded.head(s.size()) = s;
  rep.jacobian_singular_values = padded;
  rep.is_regular = s.size() >= inst.m && rep.sigma_max > 0 &&
                   padded(inst.m - 1) > rep.tolerance;
  return rep;
}

}  // namespace bmforge
