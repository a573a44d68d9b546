#include "bmforge/certify.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>

namespace bmforge {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::VALID:
      return "VALID";
    case Verdict::INVALID:
      return "INVALID";
    default:
      return "UNVERIFIED";
  }
}

ExtremeReport check_extreme_point(const SdpInstance& inst, const Matrix& U0,
                                  const Tolerances& tols) {
  if (U0.rows() != inst.n)
    throw DimensionMismatch("check_extreme_point: U0 row count mismatch");
  const int r = static_cast<int>(U0.cols());
  const int cols = r * (r + 1) / 2;
  Matrix E(inst.m, cols);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  int k = 0;
  for (int i = 0; i < r; ++i) {
    for (int j = i; j < r; ++j, ++k) {
      Matrix S = Matrix::Zero(r, r);
      if (i == j) {
        S(i, i) = 1.0;
      } else {
        S(i, j) = inv_sqrt2;
        S(j, i) = inv_sqrt2;
      }
      E.col(k) = apply_A(inst, U0 * S * U0.transpose());
    }
  }
  ExtremeReport rep;
  Eigen::JacobiSVD<Matrix> svd(E);
  const Vector& s = svd.singularValues();
  rep.sigma_max = s.size() > 0 ? s(0) : 0.0;
  rep.sigma_min = s.size() == cols && cols > 0 ? s(cols - 1) : 0.0;
  rep.tolerance = tols.basis_rank_rel * rep.sigma_max;
  const int rank = static_cast<int>((s.array() > rep.tolerance).count());
  rep.nullity = cols - rank;
  rep.extreme = rep.nullity == 0;
  return rep;
}

GroundTruth make_ground_truth(const SdpInstance& inst, const Matrix& U0,
                              const Tolerances& tols) {
  GroundTruth truth;
  truth.U0 = U0;
  truth.X0 = SymMatrix::from(U0 * U0.transpose());
  Eigen::JacobiSVD<Matrix> svd(U0);
  const Vector& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? tols.basis_rank_rel * s(0) : 0.0;
  truth.r = static_cast<int>((s.array() > cutoff).count());
  if (truth.r != U0.cols())
    throw Error("ground-truth factor is column-rank deficient (rank " +
                std::to_string(truth.r) + " of " + std::to_string(U0.cols()) +
                ")");
  truth.extremality = check_extreme_point(inst, U0, tols);
  return truth;
}

KktCertificate kkt_certificate(const SdpInstance& inst, const Matrix& C,
                               const GroundTruth& truth,
                               const std::optional<Vector>& candidate_g1,
                               const Tolerances& tols) {
  if (C.rows() != inst.n || C.cols() != inst.n)
    throw DimensionMismatch("kkt_certificate: cost order mismatch");
  const FeasibilityReport feas =
      check_feasible(inst, truth.X0.mat, tols.feas_tol);
  if (!feas.feasible)
    throw Error("planted optimum is infeasible (constraint residual " +
                std::to_string(feas.constraint_residual) + ", min eigenvalue " +
                std::to_string(feas.min_eigenvalue) + ")");

  KktCertificate cert;
  cert.candidate_supplied = candidate_g1.has_value();
  const int r = truth.r;
  if (cert.candidate_supplied) {
    if (candidate_g1->size() != inst.m)
      throw DimensionMismatch("kkt_certificate: candidate multiplier length");
    cert.g1 = *candidate_g1;
    cert.solve_residual = 0.0;
  } else {
    // Complementarity system (C - A*(g)) U0 = 0: nr equations, m unknowns.
    Matrix K(inst.n * r, inst.m);
    for (int j = 0; j < inst.m; ++j) K.col(j) = vec(inst.Ai(j) * truth.U0);
    const Vector rhs = vec(C * truth.U0);
    cert.g1 = pinv_solve(K, rhs, tols.pinv_rel);
    cert.solve_residual = (K * cert.g1 - rhs).norm();
  }

  cert.C1 = SymMatrix::from(C - apply_A_adjoint(inst, cert.g1));
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cert.C1.mat, Eigen::EigenvaluesOnly);
  const Vector evals = eig.eigenvalues();
  cert.min_eig_C1 = evals.minCoeff();
  const double eig_scale = evals.cwiseAbs().maxCoeff();
  cert.rank_C1 = static_cast<int>(
      (evals.cwiseAbs().array() > tols.rank_rel * std::max(eig_scale, 1e-300))
          .count());
  if (eig_scale == 0.0) cert.rank_C1 = 0;
  cert.compl_residual = (cert.C1.mat * truth.X0.mat).norm();
  cert.strict = cert.rank_C1 == inst.n - r;
  cert.duality_gap =
      std::abs(cert.g1.dot(inst.b) - objective(C, truth.X0.mat));

  const double scale = std::max(1.0, C.norm());
  const double psd_tol = tols.psd_rel * scale;
  const double compl_tol =
      tols.psd_rel * std::max(1.0, cert.C1.mat.norm() * truth.X0.mat.norm());
  const bool conditions_hold =
      cert.min_eig_C1 >= -psd_tol && cert.compl_residual <= compl_tol;
  const bool solve_ok =
      cert.candidate_supplied ||
      cert.solve_residual <= tols.solve_rel * std::max(1.0, (C * truth.U0).norm());

  if (conditions_hold && solve_ok) {
    cert.verdict = Verdict::VALID;
  } else if (cert.candidate_supplied) {
    // A supplied multiplier is a definite claim; judge it strictly.
    cert.verdict = Verdict::INVALID;
  } else {
    // The least-norm slice need not contain a valid multiplier even when one
    // exists, so a failed recovery is inconclusive.
    cert.verdict = Verdict::UNVERIFIED;
  }
  cert.uniqueness_certified = cert.verdict == Verdict::VALID && cert.strict &&
                              truth.extremality.extreme;
  return cert;
}

double optimality_gap(const SdpInstance& inst, const Matrix& C,
                      const GroundTruth& truth, const Matrix& V) {
  if (V.rows() != inst.n)
    throw DimensionMismatch("optimality_gap: factor row count mismatch");
  return objective(C, V * V.transpose()) - objective(C, truth.X0.mat);
}

}  // namespace bmforge
