// Independent numerical oracles shared by the unit suites: loop-based inner
// products, finite-difference derivatives of the objective and constraints,
// and small construction helpers kept deliberately separate from the library
// implementations they check.
#pragma once

#include "bmforge/manifold.hpp"
#include "bmforge/optimize.hpp"
#include "bmforge/sdp.hpp"
#include "bmforge/types.hpp"

namespace oracles {

using bmforge::Matrix;
using bmforge::Vector;

// <A, B> by explicit summation (no Eigen reductions).
inline double trace_inner(const Matrix& A, const Matrix& B) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) acc += A(i, j) * B(i, j);
  return acc;
}

// Central difference of the constraint map along D. The map is quadratic in
// V, so this equals the differential exactly up to rounding.
inline Vector fd_constraint_derivative(const bmforge::SdpInstance& inst,
                                       const Matrix& V, const Matrix& D,
                                       double h = 1e-4) {
  const Matrix Vp = V + h * D;
  const Matrix Vm = V - h * D;
  const Vector fp = bmforge::apply_A(inst, Vp * Vp.transpose());
  const Vector fm = bmforge::apply_A(inst, Vm * Vm.transpose());
  return (fp - fm) / (2.0 * h);
}

// Central difference of f_C(V) = <C, VV^T> along D; exact for quadratics.
inline double fd_objective_derivative(const Matrix& C, const Matrix& V,
                                      const Matrix& D, double h = 1e-4) {
  const Matrix Vp = V + h * D;
  const Matrix Vm = V - h * D;
  return (trace_inner(C, Vp * Vp.transpose()) -
          trace_inner(C, Vm * Vm.transpose())) /
         (2.0 * h);
}

// Second difference of f_C along the retraction curve through V. At a
// critical point this approximates the restricted Hessian value
// 2 <C2, D D^T> for any retraction.
inline double fd_hessian_value(const bmforge::SdpInstance& inst,
                               const Matrix& C, const Matrix& V,
                               const Matrix& D, double h = 1e-4) {
  const Matrix Vp = bmforge::retract(inst, V, h * D).V;
  const Matrix Vm = bmforge::retract(inst, V, -h * D).V;
  const double f0 = trace_inner(C, V * V.transpose());
  const double fp = trace_inner(C, Vp * Vp.transpose());
  const double fm = trace_inner(C, Vm * Vm.transpose());
  return (fp - 2.0 * f0 + fm) / (h * h);
}

// Random unit-norm tangent direction at V.
inline Matrix random_tangent(const bmforge::SdpInstance& inst, const Matrix& V,
                             bmforge::Rng& rng) {
  const Matrix W = rng.gaussian_matrix(static_cast<int>(V.rows()),
                                       static_cast<int>(V.cols()));
  Matrix D = bmforge::project_tangent(inst, V, W);
  const double norm = D.norm();
  return norm > 0 ? Matrix(D / norm) : D;
}

// Random feasible factor: gaussian entries pushed through the retraction.
inline Matrix random_feasible(const bmforge::SdpInstance& inst, int p,
                              bmforge::Rng& rng) {
  const Matrix W = rng.gaussian_matrix(inst.n, p);
  return bmforge::retract(inst, W, Matrix::Zero(inst.n, p)).V;
}

}  // namespace oracles
