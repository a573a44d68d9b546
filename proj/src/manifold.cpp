#include "bmforge/manifold.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>

namespace bmforge {

namespace {

// np x m matrix whose column j is vec(A_j V); its column space is the normal
// space at V and its transpose is half the constraint Jacobian.
Matrix normal_map(const SdpInstance& inst, const Matrix& V) {
  const int p = static_cast<int>(V.cols());
  Matrix K(inst.n * p, inst.m);
  for (int j = 0; j < inst.m; ++j) K.col(j) = vec(inst.Ai(j) * V);
  return K;
}

}  // namespace

TangentBasis tangent_basis(const SdpInstance& inst, const Matrix& V,
                           const Tolerances& tols) {
  const RegularityReport reg = check_p_regular(inst, V, tols);
  if (!reg.is_regular)
    throw NotRegular("constraint differential rank < m at this point "
                     "(smallest singular value " +
                     std::to_string(reg.jacobian_singular_values(inst.m - 1)) +
                     ")");
  TangentBasis tb;
  tb.V = V;
  tb.n = inst.n;
  tb.p = static_cast<int>(V.cols());
  const int np = tb.n * tb.p;

  const Matrix J = constraint_jacobian(inst, V);
  Eigen::JacobiSVD<Matrix> svd(J, Eigen::ComputeFullV);
  tb.tangent = svd.matrixV().rightCols(np - inst.m);
  fix_column_signs(tb.tangent);

  // Vertical space: images of an orthonormal antisymmetric basis, then
  // re-orthonormalized (columns can be dependent when rank(V) < p).
  const int pairs = tb.p * (tb.p - 1) / 2;
  Matrix vert_raw(np, pairs);
  int k = 0;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < tb.p; ++i) {
    for (int j = i + 1; j < tb.p; ++j, ++k) {
      Matrix K = Matrix::Zero(tb.p, tb.p);
      K(i, j) = inv_sqrt2;
      K(j, i) = -inv_sqrt2;
      vert_raw.col(k) = vec(V * K);
    }
  }
  if (pairs > 0) {
    Eigen::JacobiSVD<Matrix> vsvd(vert_raw, Eigen::ComputeThinU);
    const Vector& s = vsvd.singularValues();
    const double cutoff =
        s.size() > 0 ? tols.basis_rank_rel * std::max(s(0), 1e-300) : 0.0;
    const int vdim = static_cast<int>((s.array() > cutoff).count());
    tb.vertical = vsvd.matrixU().leftCols(vdim);
    fix_column_signs(tb.vertical);
  } else {
    tb.vertical = Matrix(np, 0);
  }

  // Horizontal space: tangent columns with their vertical component removed,
  // re-orthonormalized. An empty tangent space (np = m) short-circuits: the
  // SVD below cannot take a 0-column input.
  if (tb.tangent.cols() == 0) {
    tb.horizontal = Matrix(np, 0);
    return tb;
  }
  Matrix resid = tb.tangent;
  if (tb.vertical.cols() > 0)
    resid -= tb.vertical * (tb.vertical.transpose() * tb.tangent);
  Eigen::JacobiSVD<Matrix> hsvd(resid, Eigen::ComputeThinU);
  const Vector& hs = hsvd.singularValues();
  const double hcut =
      hs.size() > 0 ? tols.basis_rank_rel * std::max(hs(0), 1e-300) : 0.0;
  const int hdim = static_cast<int>((hs.array() > hcut).count());
  tb.horizontal = hsvd.matrixU().leftCols(hdim);
  fix_column_signs(tb.horizontal);
  return tb;
}

Matrix project_tangent(const TangentBasis& basis, const Matrix& W) {
  if (W.rows() != basis.n || W.cols() != basis.p)
    throw DimensionMismatch("project_tangent: shape mismatch");
  const Vector w = vec(W);
  return unvec(basis.tangent * (basis.tangent.transpose() * w), basis.n,
               basis.p);
}

Matrix project_tangent(const SdpInstance& inst, const Matrix& V,
                       const Matrix& W, const Tolerances& tols) {
  if (W.rows() != V.rows() || W.cols() != V.cols())
    throw DimensionMismatch("project_tangent: shape mismatch");
  const Matrix K = normal_map(inst, V);
  const Vector mu = pinv_solve(K, vec(W), tols.pinv_rel);
  return W - unvec(K * mu, static_cast<int>(V.rows()),
                   static_cast<int>(V.cols()));
}

Matrix riemannian_gradient(const SdpInstance& inst, const Matrix& C,
                           const Matrix& V, const Tolerances& tols) {
  return 2.0 * project_tangent(inst, V, C * V, tols);
}

FirstOrderCertificate first_order_certificate(const SdpInstance& inst,
                                              const Matrix& C, const Matrix& V,
                                              const Tolerances& tols) {
  if (C.rows() != inst.n || C.cols() != inst.n)
    throw DimensionMismatch("first_order_certificate: cost order mismatch");
  const RegularityReport reg = check_p_regular(inst, V, tols);
  if (!reg.is_regular)
    throw NotRegular("multiplier not unique: point is not p-regular");
  FirstOrderCertificate cert;
  const Matrix K = normal_map(inst, V);
  cert.g2 = pinv_solve(K, vec(C * V), tols.pinv_rel);
  cert.C2 = SymMatrix::from(C - apply_A_adjoint(inst, cert.g2));
  cert.residual_C2V = (cert.C2.mat * V).norm();
  cert.tol_used = tols.crit_rel * C.norm();
  cert.is_critical = cert.residual_C2V <= cert.tol_used;
  return cert;
}

double hessian_quadratic(const FirstOrderCertificate& cert, const Matrix& dV1,
                         const Matrix& dV2) {
  return inner(cert.C2.mat,
               dV1 * dV2.transpose() + dV2 * dV1.transpose());
}

Matrix quadratic_form_on_basis(const Matrix& M, const Matrix& basis_cols,
                               int n, int p) {
  const int k = static_cast<int>(basis_cols.cols());
  // Columns of M * B_k, stacked: form(k,l) = 2 <M B_k, B_l> by symmetry of M.
  Matrix MB(n * p, k);
  for (int i = 0; i < k; ++i)
    MB.col(i) = vec(M * unvec(basis_cols.col(i), n, p));
  Matrix H = 2.0 * (MB.transpose() * basis_cols);
  return 0.5 * (H + H.transpose());
}

SecondOrderReport second_order_report(const SdpInstance& inst, const Matrix& C,
                                      const Matrix& V,
                                      const Tolerances& tols) {
  SecondOrderReport rep;
  rep.first_order = first_order_certificate(inst, C, V, tols);
  if (!rep.first_order.is_critical)
    throw NotFirstOrderCritical(
        "second-order report requested at a non-critical point (||C2 V|| = " +
        std::to_string(rep.first_order.residual_C2V) + " > " +
        std::to_string(rep.first_order.tol_used) + ")");
  const TangentBasis tb = tangent_basis(inst, V, tols);
  const int p = tb.p;
  rep.expected_kernel_dim = p * (p - 1) / 2;

  if (tb.dim() == 0) {
    // Zero-dimensional manifold: vacuously second order and non-degenerate
    // when no kernel is expected.
    rep.eigenvalues = Vector(0);
    rep.zero_dim = 0;
    rep.zero_tol = tols.eig_zero_rel;
    rep.psd_tol = tols.psd_rel;
    rep.is_second_order = true;
    rep.is_nondegenerate = rep.expected_kernel_dim == 0;
    return rep;
  }

  const Matrix H =
      quadratic_form_on_basis(rep.first_order.C2.mat, tb.tangent, tb.n, tb.p);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(H, Eigen::EigenvaluesOnly);
  rep.eigenvalues = eig.eigenvalues();  // ascending
  const double spectral_scale =
      std::max(1.0, rep.eigenvalues.cwiseAbs().maxCoeff());
  rep.zero_tol = tols.eig_zero_rel * spectral_scale;
  rep.psd_tol = tols.psd_rel * spectral_scale;
  rep.zero_dim = static_cast<int>(
      (rep.eigenvalues.cwiseAbs().array() <= rep.zero_tol).count());
  rep.is_second_order = rep.eigenvalues.minCoeff() >= -rep.psd_tol;
  const bool kernel_matches = rep.zero_dim == rep.expected_kernel_dim;
  const bool rest_positive =
      rep.zero_dim >= tb.dim() || rep.eigenvalues(rep.zero_dim) > rep.zero_tol;
  rep.is_nondegenerate = rep.is_second_order && kernel_matches && rest_positive;
  return rep;
}

}  // namespace bmforge
