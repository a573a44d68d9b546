// Geometry of the feasible factor manifold: tangent bases, projections,
// Riemannian gradient/Hessian of f_C(V) = <C, VV^T>, and the first/second
// order criticality certificates.
#pragma once

#include "bmforge/sdp.hpp"
#include "bmforge/types.hpp"

namespace bmforge {

// Orthonormal bases at a point V, stored as column-stacked vec'd matrices.
//   tangent:    np x (np - m)  null space of the constraint differential
//   vertical:   np x dim       span of {V K : K antisymmetric}
//   horizontal: np x dim       complement of vertical inside tangent
struct TangentBasis {
  Matrix V;
  int n = 0;
  int p = 0;
  Matrix tangent;
  Matrix vertical;
  Matrix horizontal;

  int dim() const { return static_cast<int>(tangent.cols()); }
  int vertical_dim() const { return static_cast<int>(vertical.cols()); }
  int horizontal_dim() const { return static_cast<int>(horizontal.cols()); }
  // k-th tangent basis element as an n x p matrix.
  Matrix mat(int k) const { return unvec(tangent.col(k), n, p); }
};

// Throws NotRegular when the constraint differential has rank < m.
TangentBasis tangent_basis(const SdpInstance& inst, const Matrix& V,
                           const Tolerances& tols = {});

// Orthogonal projection onto the tangent space via the stored basis.
Matrix project_tangent(const TangentBasis& basis, const Matrix& W);

// Basis-free projection: subtracts the least-squares normal component
// A*(mu) V. Agrees with the basis route; preferred in inner loops.
Matrix project_tangent(const SdpInstance& inst, const Matrix& V,
                       const Matrix& W, const Tolerances& tols = {});

// grad f_C(V) = 2 Proj_V(C V).
Matrix riemannian_gradient(const SdpInstance& inst, const Matrix& C,
                           const Matrix& V, const Tolerances& tols = {});

struct FirstOrderCertificate {
  Vector g2;
  SymMatrix C2;             // C - A*(g2)
  double residual_C2V = 0;  // ||C2 V||_F
  bool is_critical = false;
  double tol_used = 0.0;  // absolute threshold residual was compared against
};

// g2 = least-squares solution of min_g ||C V - A*(g) V||_F (unique under
// p-regularity); critical iff the residual is <= crit_rel * ||C||_F.
FirstOrderCertificate first_order_certificate(const SdpInstance& inst,
                                              const Matrix& C, const Matrix& V,
                                              const Tolerances& tols = {});

// Polarized Hessian bilinear form at a first-order critical point:
// <C2, dV1 dV2^T + dV2 dV1^T>; equals 2<C2, dV dV^T> on the diagonal.
double hessian_quadratic(const FirstOrderCertificate& cert, const Matrix& dV1,
                         const Matrix& dV2);

struct SecondOrderReport {
  Vector eigenvalues;  // restricted Hessian spectrum, ascending
  int zero_dim = 0;    // count of |lambda| <= zero_tol
  bool is_second_order = false;   // min eigenvalue >= -psd_tol
  bool is_nondegenerate = false;  // kernel is exactly the vertical space
  int expected_kernel_dim = 0;    // p(p-1)/2
  double zero_tol = 0.0;
  double psd_tol = 0.0;
  FirstOrderCertificate first_order;
};

// Assembles the symmetric form matrix of the Hessian on the tangent basis and
// eigendecomposes it. Throws NotFirstOrderCritical when the first-order
// certificate rejects V.
SecondOrderReport second_order_report(const SdpInstance& inst, const Matrix& C,
                                      const Matrix& V,
                                      const Tolerances& tols = {});

// Symmetric k x k matrix of the quadratic form dV -> <M, dV dV^T> on the
// given vec'd basis columns (polarized off the diagonal). Shared by the
// second-order report and the forge's shift computation.
Matrix quadratic_form_on_basis(const Matrix& M, const Matrix& basis_cols,
                               int n, int p);

}  // namespace bmforge
