#include "bmforge/optimize.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

namespace bmforge {

namespace {

Matrix renormalize_rows(const Matrix& W) {
  Matrix out = W;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm < 1e-300)
      throw ProjectionDiverged("row " + std::to_string(i) +
                               " collapsed to zero during retraction");
    out.row(i) /= norm;
  }
  return out;
}

Matrix rescale_blocks(const Matrix& W, const std::vector<int>& dims) {
  Matrix out = W;
  int offset = 0;
  for (int d : dims) {
    const double norm = out.middleRows(offset, d).norm();
    if (norm < 1e-300)
      throw ProjectionDiverged("block at row " + std::to_string(offset) +
                               " collapsed to zero during retraction");
    out.middleRows(offset, d) /= norm;
    offset += d;
  }
  return out;
}

Matrix polar_blocks(const Matrix& W, const std::vector<int>& dims) {
  Matrix out = W;
  int offset = 0;
  for (int d : dims) {
    Eigen::JacobiSVD<Matrix> svd(out.middleRows(offset, d),
                                 Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues().minCoeff() < 1e-300)
      throw ProjectionDiverged("block at row " + std::to_string(offset) +
                               " lost rank during polar retraction");
    out.middleRows(offset, d) = svd.matrixU() * svd.matrixV().transpose();
    offset += d;
  }
  return out;
}

// Gauss-Newton projection onto {A(WW^T) = b} starting at W.
Matrix project_feasible(const SdpInstance& inst, Matrix W,
                        const Tolerances& tols) {
  constexpr int kMaxIter = 50;
  constexpr double kTarget = 1e-10;
  double best = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < kMaxIter; ++iter) {
    const Vector res = apply_A(inst, W * W.transpose()) - inst.b;
    const double rnorm = res.cwiseAbs().maxCoeff();
    if (rnorm <= kTarget) return W;
    if (rnorm > 1e6 * std::max(best, 1.0))
      throw ProjectionDiverged("feasibility projection diverged (residual " +
                               std::to_string(rnorm) + ")");
    best = std::min(best, rnorm);
    const Matrix J = constraint_jacobian(inst, W);
    const Vector delta = pinv_solve(J, res, tols.pinv_rel);
    W -= unvec(delta, inst.n, static_cast<int>(W.cols()));
  }
  throw ProjectionDiverged(
      "feasibility projection did not reach 1e-10 in 50 iterations");
}

double objective_at(const Matrix& C, const Matrix& V) {
  return (V.transpose() * C * V).trace();
}

}  // namespace

FactorPoint retract(const SdpInstance& inst, const Matrix& V, const Matrix& dV,
                    const Tolerances& tols) {
  if (dV.rows() != V.rows() || dV.cols() != V.cols())
    throw DimensionMismatch("retract: dV shape mismatch");
  const Matrix W = V + dV;
  Matrix out;
  switch (inst.family) {
    case Family::maxcut:
      out = renormalize_rows(W);
      break;
    case Family::spheres:
      out = rescale_blocks(W, inst.block_dims);
      break;
    case Family::orthocut:
      out = polar_blocks(W, inst.block_dims);
      break;
    default:
      out = project_feasible(inst, W, tols);
      break;
  }
  return make_factor_point(inst, out, tols);
}

DescentTrace descend(const SdpInstance& inst, const Matrix& C, const Matrix& V0,
                     const DescentOptions& opts, const Tolerances& tols) {
  const int n = inst.n;
  const int p = static_cast<int>(V0.cols());
  DescentTrace trace;
  trace.rng_seed = opts.rng_seed;

  Matrix V = retract(inst, V0, Matrix::Zero(n, p), tols).V;
  double obj = objective_at(C, V);
  const double c_scale = std::max(1.0, C.norm());
  const double grad_tol = opts.tol_grad_rel * c_scale;

  // Report tolerances: criticality threshold loosened to be consistent with
  // the gradient stopping rule, kernel threshold tied to tol_eig_rel.
  Tolerances rep_tols = tols;
  rep_tols.crit_rel = std::max(
      tols.crit_rel, 3.0 * opts.tol_grad_rel * c_scale /
                         std::max(C.norm(), 1e-300));
  rep_tols.eig_zero_rel = std::max(tols.eig_zero_rel, opts.tol_eig_rel);

  double step = 1.0 / c_scale;
  const auto record = [&](int iter, double gn, double used, char event) {
    if (!opts.record_steps) return;
    trace.steps.push_back({iter, obj, gn, used, event});
  };

  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    const RegularityReport reg = check_p_regular(inst, V, tols);
    if (!reg.is_regular)
      throw NotRegular("descent iterate lost p-regularity at step " +
                       std::to_string(iter));
    const Matrix grad = riemannian_gradient(inst, C, V, tols);
    const double gn = grad.norm();

    bool stationary = gn <= grad_tol;
    if (!stationary) {
      // Backtracking Armijo line search along -grad.
      bool accepted = false;
      double t = step;
      for (int h = 0; h <= opts.max_halvings; ++h) {
        FactorPoint cand = retract(inst, V, -t * grad, tols);
        const double cand_obj = objective_at(C, cand.V);
        // Strict decrease guards against accepting steps whose Armijo margin
        // underflows the objective's resolution (an infinite stall otherwise).
        if (cand_obj <= obj - opts.armijo * t * gn * gn && cand_obj < obj) {
          V = cand.V;
          obj = cand_obj;
          record(iter, gn, t, 'g');
          step = 2.0 * t;
          ++trace.grad_steps;
          accepted = true;
          break;
        }
        t *= opts.shrink;
      }
      if (!accepted) stationary = true;  // at the line-search noise floor
    }

    if (stationary) {
      // Polish: fixed-step gradient iterations accepted on gradient-norm
      // decrease. The Armijo test above stalls once the predicted decrease
      // drops below the objective's representable resolution; the gradient
      // norm keeps full relative precision at any magnitude, so this drives
      // the iterate the rest of the way to the tolerance.
      {
        const double t = 0.25 / c_scale;
        Matrix g_cur = riemannian_gradient(inst, C, V, tols);
        double gn_cur = g_cur.norm();
        for (int h = 0; h < opts.max_polish && gn_cur > grad_tol; ++h) {
          const FactorPoint cand = retract(inst, V, -t * g_cur, tols);
          const Matrix g_new = riemannian_gradient(inst, C, cand.V, tols);
          const double gn_new = g_new.norm();
          if (gn_new >= gn_cur) break;
          V = cand.V;
          g_cur = g_new;
          gn_cur = gn_new;
          obj = objective_at(C, V);
          record(iter, gn_cur, t, 'p');
          ++trace.polish_steps;
        }
      }
      SecondOrderReport report;
      try {
        report = second_order_report(inst, C, V, rep_tols);
      } catch (const NotFirstOrderCritical&) {
        // Line search and polish both bottomed out away from criticality
        // (severe ill-conditioning); report the failure honestly.
        trace.converged = false;
        break;
      }
      if (report.is_second_order) {
        trace.terminal_report = std::move(report);
        trace.converged = true;
        break;
      }
      // Escape along the most negative restricted-Hessian direction.
      const TangentBasis tb = tangent_basis(inst, V, tols);
      const Matrix H =
          quadratic_form_on_basis(report.first_order.C2.mat, tb.tangent, n, p);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(H);
      const Matrix D = unvec(tb.tangent * eig.eigenvectors().col(0), n, p);
      const double lam = eig.eigenvalues()(0);  // < 0 here

      bool escaped = false;
      double t = std::min(1.0, 2.0 * std::abs(lam) / c_scale + 1e-3);
      for (int h = 0; h <= opts.max_halvings && !escaped; ++h) {
        for (const double sign : {1.0, -1.0}) {
          FactorPoint cand = retract(inst, V, sign * t * D, tols);
          const double cand_obj = objective_at(C, cand.V);
          if (cand_obj <= obj - 0.5 * opts.armijo * t * t * std::abs(lam) &&
              cand_obj < obj) {
            V = cand.V;
            obj = cand_obj;
            record(iter, gn, t, 'e');
            ++trace.escape_steps;
            escaped = true;
            break;
          }
        }
        t *= opts.shrink;
      }
      if (!escaped) {
        // Cannot certify second order and cannot move: report honestly.
        trace.terminal_report = std::move(report);
        trace.converged = false;
        break;
      }
    }
  }
  if (iter == opts.max_iter) {
    trace.max_iter_exceeded = true;
    try {
      trace.terminal_report = second_order_report(inst, C, V, rep_tols);
    } catch (const Error&) {
      // Far from criticality; leave the report empty.
    }
  }

  trace.terminal_V = V;
  trace.terminal_objective = obj;
  trace.terminal_grad_norm = riemannian_gradient(inst, C, V, tols).norm();
  return trace;
}

double procrustes_distance(const Matrix& W, const Matrix& V) {
  if (W.rows() != V.rows() || W.cols() != V.cols())
    throw DimensionMismatch("procrustes_distance: shape mismatch");
  // Apply the optimal rotation explicitly instead of the sqrt-of-difference
  // formula, which loses half the digits to cancellation near the orbit.
  Eigen::JacobiSVD<Matrix> svd(V.transpose() * W,
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix Q = svd.matrixU() * svd.matrixV().transpose();
  return (W - V * Q).norm();
}

namespace {

// KKT certificate at the rounded terminal: U0' is the truncated SVD factor of
// the terminal point and the least-squares multiplier is the candidate.
void certify_terminal(const SdpInstance& inst, const Matrix& C,
                      const Matrix& V_term, double obj,
                      const Tolerances& tols, BasinSeedResult& res) {
  try {
    Eigen::JacobiSVD<Matrix> svd(V_term,
                                 Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    const int rank = std::max<int>(
        1, static_cast<int>((s.array() > tols.rank_rel * s(0)).count()));
    const Matrix U0 =
        svd.matrixU().leftCols(rank) * s.head(rank).asDiagonal();
    const GroundTruth rounded = make_ground_truth(inst, U0, tols);
    const FirstOrderCertificate fo =
        first_order_certificate(inst, C, V_term, tols);
    const KktCertificate kkt =
        kkt_certificate(inst, C, rounded, fo.g2, tols);
    res.certified_global = kkt.verdict == Verdict::VALID;
    res.rel_duality_gap = std::abs(fo.g2.dot(inst.b) - obj) /
                          std::max(1.0, std::abs(obj));
  } catch (const Error&) {
    res.certified_global = false;
  }
}

}  // namespace

BasinSummary basin_experiment(const SdpInstance& inst, const Matrix& C,
                              const std::optional<GroundTruth>& truth,
                              const std::optional<Matrix>& V_spurious, int p,
                              int num_seeds, std::uint64_t rng_seed,
                              const DescentOptions& opts,
                              const Tolerances& tols) {
  if (num_seeds < 1)
    throw DimensionMismatch("basin_experiment: num_seeds must be >= 1");
  BasinSummary summary;
  summary.num_seeds = num_seeds;
  summary.rng_seed = rng_seed;

  const double global_obj =
      truth ? objective(C, truth->X0.mat) : 0.0;
  const double trap_radius =
      V_spurious ? 1e-4 * V_spurious->norm() : 0.0;

  int n_global = 0, n_trapped = 0, n_cert = 0, n_other = 0;
  for (int k = 0; k < num_seeds; ++k) {
    Rng rng = Rng::derive(rng_seed, static_cast<std::uint64_t>(k));
    const Matrix V0raw = rng.gaussian_matrix(inst.n, p);
    const FactorPoint V0 = retract(inst, V0raw, Matrix::Zero(inst.n, p), tols);

    DescentOptions dopts = opts;
    dopts.record_steps = false;
    dopts.rng_seed = rng_seed;
    const DescentTrace trace = descend(inst, C, V0.V, dopts, tols);

    BasinSeedResult res;
    res.seed_index = static_cast<std::uint64_t>(k);
    res.objective = trace.terminal_objective;
    res.iterations = trace.grad_steps + trace.escape_steps;
    res.second_order_ok =
        trace.converged && trace.terminal_report &&
        trace.terminal_report->is_second_order;
    if (truth)
      res.reached_global = trace.terminal_objective <=
                           global_obj + 1e-6 * std::max(1.0, std::abs(global_obj));
    if (V_spurious) {
      res.procrustes_dist = procrustes_distance(trace.terminal_V, *V_spurious);
      res.trapped = res.procrustes_dist <= trap_radius;
    }
    certify_terminal(inst, C, trace.terminal_V, trace.terminal_objective, tols,
                     res);

    n_global += res.reached_global ? 1 : 0;
    n_trapped += res.trapped ? 1 : 0;
    n_cert += res.certified_global ? 1 : 0;
    n_other += (!res.reached_global && !res.trapped) ? 1 : 0;
    summary.per_seed.push_back(std::move(res));
  }
  const double denom = static_cast<double>(num_seeds);
  summary.fraction_global = n_global / denom;
  summary.fraction_trapped = n_trapped / denom;
  summary.fraction_certified = n_cert / denom;
  summary.fraction_other = n_other / denom;
  return summary;
}

}  // namespace bmforge
