#include "bmforge/forge.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <string>

namespace bmforge {

namespace {

// Row-major upper triangle (diagonal included) of a square block.
Vector upper_triangle(const Matrix& M) {
  const int k = static_cast<int>(M.rows());
  Vector out(k * (k + 1) / 2);
  int idx = 0;
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) out(idx++) = M(i, j);
  return out;
}

}  // namespace

TransformedInstance change_of_basis(const SdpInstance& inst,
                                    const GroundTruth& truth, const Matrix& V,
                                    const Tolerances& tols) {
  const int n = inst.n;
  const int r = truth.r;
  const int p = static_cast<int>(V.cols());
  if (V.rows() != n) throw DimensionMismatch("change_of_basis: V row count");
  if (r + p > n)
    throw DependentColumns("[U0 V] has more columns than rows (" +
                           std::to_string(r + p) + " > " + std::to_string(n) +
                           ")");

  Matrix joint(n, r + p);
  joint.leftCols(r) = truth.U0;
  joint.rightCols(p) = V;
  Eigen::JacobiSVD<Matrix> svd(joint, Eigen::ComputeFullU);
  const Vector& s = svd.singularValues();
  const int rank =
      s(0) > 0 ? static_cast<int>((s.array() > tols.basis_rank_rel * s(0)).count())
               : 0;
  if (rank < r + p)
    throw DependentColumns("columns of [U0 V] are dependent (rank " +
                           std::to_string(rank) + " < " +
                           std::to_string(r + p) + ")");

  TransformedInstance ti;
  ti.r = r;
  ti.p = p;
  Matrix W = svd.matrixU().rightCols(n - r - p);
  fix_column_signs(W);
  ti.G = Matrix(n, n);
  ti.G.leftCols(r) = truth.U0;
  ti.G.middleCols(r, p) = V;
  ti.G.rightCols(n - r - p) = W;

  Eigen::JacobiSVD<Matrix> gsvd(ti.G);
  const Vector& gs = gsvd.singularValues();
  ti.cond_G = gs(n - 1) > 0 ? gs(0) / gs(n - 1)
                            : std::numeric_limits<double>::infinity();

  std::vector<Matrix> At;
  At.reserve(inst.A.size());
  for (int i = 0; i < inst.m; ++i)
    At.push_back(ti.G.transpose() * inst.Ai(i) * ti.G);
  ti.inst = make_instance(At, inst.b);

  ti.X0_t = Matrix::Zero(n, n);
  ti.X0_t.topLeftCorner(r, r) = Matrix::Identity(r, r);
  ti.V_t = Matrix::Zero(n, p);
  ti.V_t.middleRows(r, p) = Matrix::Identity(p, p);
  return ti;
}

G1Solution solve_g1(const TransformedInstance& ti, const Tolerances& tols) {
  const int n = ti.inst.n;
  const int m = ti.inst.m;
  const int r = ti.r;
  const int p = ti.p;
  const int q = n - r - p;
  const int rows = r * p + p * (p + 1) / 2;

  Matrix M(rows, m);
  for (int j = 0; j < m; ++j) {
    const Matrix& Aj = ti.inst.Ai(j);
    M.col(j).head(r * p) = vec(Aj.block(0, r, r, p));
    M.col(j).tail(p * (p + 1) / 2) = upper_triangle(Aj.block(r, r, p, p));
  }
  Vector rhs = Vector::Zero(rows);
  rhs.tail(p * (p + 1) / 2) =
      upper_triangle(-Matrix::Identity(p, p));

  G1Solution sol;
  sol.g1 = pinv_solve(M, rhs, tols.pinv_rel);
  sol.residual = (M * sol.g1 - rhs).norm();
  const double scale = std::max(1.0, rhs.norm());
  if (sol.residual > tols.solve_rel * scale)
    throw SystemInconsistent(
        "multiplier system has no solution at the requested accuracy "
        "(residual " +
        std::to_string(sol.residual) +
        "); the pair is likely not minimally secant");

  const Matrix Ag = apply_A_adjoint(ti.inst, sol.g1);
  sol.G1 = Ag.topLeftCorner(r, r);
  sol.G2 = Ag.block(0, r + p, r, q);
  sol.G3 = Ag.block(r, r, p, p);
  sol.G4 = Ag.block(r, r + p, p, q);
  sol.G5 = Ag.bottomRightCorner(q, q);
  sol.R1 = Matrix::Zero(r, p);
  sol.R2 = -Matrix::Identity(p, p);
  return sol;
}

D1Completion build_D1(const Matrix& G3, const Matrix& G4, double margin) {
  const int p = static_cast<int>(G3.rows());
  const int q = static_cast<int>(G4.cols());
  const Matrix negG3 = -0.5 * (G3 + G3.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(negG3);
  if (eig.eigenvalues().minCoeff() <= 0)
    throw G3NotNegDef("extracted (2,2) block is not negative definite "
                      "(min eigenvalue of -G3 is " +
                      std::to_string(eig.eigenvalues().minCoeff()) + ")");

  D1Completion out;
  double lambda_star = 0.0;
  if (q > 0) {
    const Matrix schur =
        G4.transpose() * negG3.llt().solve(G4);
    Eigen::SelfAdjointEigenSolver<Matrix> seig(
        0.5 * (schur + schur.transpose()), Eigen::EigenvaluesOnly);
    lambda_star = seig.eigenvalues().maxCoeff();
  }
  out.lambda = std::max(0.0, lambda_star) + margin;
  out.D1 = Matrix(p + q, p + q);
  out.D1.topLeftCorner(p, p) = negG3;
  out.D1.topRightCorner(p, q) = -G4;
  out.D1.bottomLeftCorner(q, p) = -G4.transpose();
  out.D1.bottomRightCorner(q, q) = out.lambda * Matrix::Identity(q, q);
  Eigen::SelfAdjointEigenSolver<Matrix> check(out.D1, Eigen::EigenvaluesOnly);
  if (check.eigenvalues().minCoeff() <= 0)
    throw Error("completion failed to be positive definite (min eigenvalue " +
                std::to_string(check.eigenvalues().minCoeff()) + ")");
  return out;
}

TShift build_t_shift(const TransformedInstance& ti, const Matrix& C1_t,
                     const Matrix& C2_t, double margin,
                     const Tolerances& tols) {
  const int n = ti.inst.n;
  const int r = ti.r;
  const int p = ti.p;
  const int q = n - r - p;

  if ((C2_t * ti.V_t).norm() > tols.solve_rel * std::max(1.0, C2_t.norm()))
    throw PreconditionFailed("t_shift",
                             "C2 does not annihilate the transformed factor");

  Matrix shift = Matrix::Zero(n, n);
  if (q > 0) shift.bottomRightCorner(q, q) = Matrix::Identity(q, q);

  const TangentBasis tb = tangent_basis(ti.inst, ti.V_t, tols);
  const Matrix& E = tb.horizontal;
  const int h = tb.horizontal_dim();

  TShift out;
  if (h == 0) {
    out.t = margin;
    out.horizontal_spectrum_after = Vector(0);
  } else {
    const Matrix QC = quadratic_form_on_basis(C2_t, E, n, p);
    const Matrix QS = quadratic_form_on_basis(shift, E, n, p);
    Eigen::SelfAdjointEigenSolver<Matrix> qs_eig(QS, Eigen::EigenvaluesOnly);
    const double qs_scale =
        std::max(1.0, qs_eig.eigenvalues().cwiseAbs().maxCoeff());
    if (qs_eig.eigenvalues().minCoeff() <= tols.psd_rel * qs_scale)
      throw ShiftNotPD(
          "shift form is not positive definite on the horizontal space "
          "(min eigenvalue " +
          std::to_string(qs_eig.eigenvalues().minCoeff()) +
          "); minimal secancy is violated");
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> pencil(-QC, QS);
    out.t = std::max(0.0, pencil.eigenvalues().maxCoeff()) + margin;
    Eigen::SelfAdjointEigenSolver<Matrix> after(QC + out.t * QS,
                                                Eigen::EigenvaluesOnly);
    out.horizontal_spectrum_after = after.eigenvalues();
    if (out.horizontal_spectrum_after.minCoeff() <= 0)
      throw Error("shifted horizontal form failed to be positive definite");
  }
  out.C1_mod = C1_t + out.t * shift;
  out.C2_mod = C2_t + out.t * shift;
  return out;
}

ForgeResult forge(const SdpInstance& inst, const GroundTruth& truth,
                  const Matrix& V, const ForgeMargins& margins,
                  const Tolerances& tols) {
  const int n = inst.n;
  const int p = static_cast<int>(V.cols());
  const int r = truth.r;

  const DimensionForecast forecast = dimension_predictor(n, inst.m, p, r);
  if (!forecast.feasible)
    throw PreconditionFailed(
        "dimension_predictor",
        "slack = " + std::to_string(forecast.slack) +
            " < 0: need p(p+1)/2 + p r <= m for a minimally secant pair");
  if (!truth.extremality.extreme)
    throw PreconditionFailed(
        "extreme_point", "planted optimum is not an extreme point (nullity " +
                             std::to_string(truth.extremality.nullity) + ")");
  const FactorPoint fp = make_factor_point(inst, V, tols);
  if (fp.feasibility_residual > tols.feas_tol)
    throw PreconditionFailed(
        "feasible", "factor is infeasible (residual " +
                        std::to_string(fp.feasibility_residual) + ")");
  const RegularityReport reg = check_p_regular(inst, V, tols);
  if (!reg.is_regular)
    throw PreconditionFailed("p_regular",
                             "constraint differential is not surjective at V");
  const MinSecantReport ms = check_min_secant(inst, truth, V, tols);
  if (!ms.verdict)
    throw PreconditionFailed(
        "min_secant",
        std::string("pair is not minimally secant (property1 ") +
            (ms.property1 ? "ok" : "FAIL") + ", property2 " +
            (ms.property2 ? "ok" : "FAIL") + ", property3 " +
            (ms.property3 ? "ok" : "FAIL") + ")");

  const TransformedInstance ti = change_of_basis(inst, truth, V, tols);
  const G1Solution sol = solve_g1(ti, tols);
  const D1Completion d1 = build_D1(sol.G3, sol.G4, margins.lambda_margin);

  const int q = n - r - p;
  Matrix C1_t = Matrix::Zero(n, n);
  C1_t.bottomRightCorner(p + q, p + q) = d1.D1;
  const Matrix Ag_t = apply_A_adjoint(ti.inst, sol.g1);
  const Matrix C2_t = Ag_t + C1_t;

  const TShift ts = build_t_shift(ti, C1_t, C2_t, margins.t_margin, tols);

  // Map back: congruence with G^{-1} undoes the change of basis.
  const Matrix Gi = ti.G.fullPivLu().inverse();
  const Matrix C_raw = Gi.transpose() * ts.C2_mod * Gi;
  const Matrix C = 0.5 * (C_raw + C_raw.transpose());
  const Matrix C1_raw = Gi.transpose() * ts.C1_mod * Gi;

  ForgeResult res;
  res.C.C = SymMatrix::from(C);
  res.C.provenance = "forged";
  res.C.params = {{"lambda", d1.lambda},
                  {"t", ts.t},
                  {"lambda_margin", margins.lambda_margin},
                  {"t_margin", margins.t_margin}};
  res.C1 = 0.5 * (C1_raw + C1_raw.transpose());
  res.g1 = sol.g1;

  ForgeIntermediates& im = res.intermediates;
  im.G = ti.G;
  im.cond_G = ti.cond_G;
  im.g1 = sol.g1;
  im.solve_residual = sol.residual;
  im.G1 = sol.G1;
  im.G2 = sol.G2;
  im.G3 = sol.G3;
  im.G4 = sol.G4;
  im.G5 = sol.G5;
  im.R1 = sol.R1;
  im.R2 = sol.R2;
  im.D1 = d1.D1;
  im.lambda = d1.lambda;
  im.F1 = sol.G1;
  im.F2 = sol.G2;
  im.F3 = sol.G5 + d1.lambda * Matrix::Identity(q, q);
  im.t = ts.t;
  im.C1_t = C1_t;
  im.C2_t = C2_t;
  im.C1_mod_t = ts.C1_mod;
  im.C2_mod_t = ts.C2_mod;
  im.g2_transformed = Vector::Zero(inst.m);

  // Certificates recomputed from scratch in original coordinates.
  res.kkt = kkt_certificate(inst, C, truth, res.g1, tols);
  res.first_order = first_order_certificate(inst, C, V, tols);
  res.g2 = res.first_order.g2;
  res.second_order = second_order_report(inst, C, V, tols);
  res.min_secant = ms;
  res.gap = optimality_gap(inst, C, truth, V);

  std::string failure;
  if (res.kkt.verdict != Verdict::VALID) failure = "KKT certificate INVALID";
  if (!res.kkt.strict) failure = "complementary slackness is not strict";
  if (!res.first_order.is_critical) failure = "factor is not first-order critical";
  if (!res.second_order.is_nondegenerate)
    failure = "second-order report is degenerate";
  if (!(res.gap > 0)) failure = "optimality gap is not positive";
  if (!failure.empty())
    throw PreconditionFailed("certify", failure + " after forging");
  return res;
}

}  // namespace bmforge
