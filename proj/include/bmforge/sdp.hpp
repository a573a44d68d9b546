// SDP data model: constraint system (A, b), cost matrices, factor points,
// the constraint operator / adjoint, feasibility and p-regularity checks.
#pragma once

#include "bmforge/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace bmforge {

// Dense symmetric matrix. Inputs are symmetrized as (M + M^T)/2 on ingestion
// and the relative asymmetry that was removed is kept for audit.
struct SymMatrix {
  Matrix mat;
  double asymmetry = 0.0;  // ||M - M^T|| / max(1, ||M||), before symmetrization

  int order() const { return static_cast<int>(mat.rows()); }
  static SymMatrix from(const Matrix& raw);
};

enum class Family { generic, maxcut, orthocut, spheres };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

// min <C, X>  s.t.  <A_i, X> = b_i (i = 1..m),  X PSD.
struct SdpInstance {
  int n = 0;
  int m = 0;
  std::vector<SymMatrix> A;
  Vector b;
  Family family = Family::generic;
  // Row-block sizes for block-structured families (orthocut: d repeated S
  // times; spheres: the d_s). Empty for generic/maxcut.
  std::vector<int> block_dims;

  const Matrix& Ai(int i) const { return A[static_cast<std::size_t>(i)].mat; }
};

// Validates shapes and symmetrizes every A_i.
SdpInstance make_instance(const std::vector<Matrix>& A, const Vector& b,
                          Family family = Family::generic,
                          std::vector<int> block_dims = {});

struct CostMatrix {
  SymMatrix C;
  std::string provenance = "loaded";  // loaded | forged | perturbed
  std::map<std::string, double> params;

  int order() const { return C.order(); }
};

// An n x p factor with its diagnostics. feasibility_residual is always
// reported, never silently assumed zero.
struct FactorPoint {
  Matrix V;
  int p = 0;
  int numerical_rank = 0;
  double feasibility_residual = 0.0;  // max_i |<A_i, VV^T> - b_i|
};

FactorPoint make_factor_point(const SdpInstance& inst, const Matrix& V,
                              const Tolerances& tols = {});

struct RegularityReport {
  Vector jacobian_singular_values;  // the m smallest, descending sigma_max first
  bool is_regular = false;
  double tolerance = 0.0;  // absolute threshold actually applied
  double sigma_max = 0.0;
};

struct FeasibilityReport {
  double constraint_residual = 0.0;  // max_i |<A_i, X> - b_i|
  double min_eigenvalue = 0.0;
  bool feasible = false;
  double tol = 0.0;
};

// (A(X))_i = <A_i, X>.
Vector apply_A(const SdpInstance& inst, const Matrix& X);

// A*(g) = sum_i g_i A_i; adjoint of apply_A.
Matrix apply_A_adjoint(const SdpInstance& inst, const Vector& g);

// <C, X>.
double objective(const Matrix& C, const Matrix& X);
double objective(const CostMatrix& C, const Matrix& X);

FeasibilityReport check_feasible(const SdpInstance& inst, const Matrix& X,
                                 double tol);

// m x (np) matrix of the differential dV -> A(V dV^T + dV V^T); row i is
// vec(2 A_i V)^T in column-major vec convention.
Matrix constraint_jacobian(const SdpInstance& inst, const Matrix& V);

// p-regularity at V: the differential above is surjective, i.e. its m-th
// singular value exceeds regularity_rel * sigma_max.
RegularityReport check_p_regular(const SdpInstance& inst, const Matrix& V,
                                 const Tolerances& tols = {});

}  // namespace bmforge
