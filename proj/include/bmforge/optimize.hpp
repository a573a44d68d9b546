// Riemannian descent demonstrator: family-aware retractions, backtracking
// gradient descent with eigenvector escape from saddles, and the seeded
// basin-of-attraction experiment.
#pragma once

#include "bmforge/certify.hpp"
#include "bmforge/manifold.hpp"
#include "bmforge/sdp.hpp"
#include "bmforge/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace bmforge {

// Family-specific retraction of V + dV onto the feasible set:
// unit-diagonal rows renormalized; spheres blocks rescaled; orthogonality
// blocks replaced by their polar factor; generic instances projected by
// Gauss-Newton (throws ProjectionDiverged on failure).
FactorPoint retract(const SdpInstance& inst, const Matrix& V, const Matrix& dV,
                    const Tolerances& tols = {});

struct DescentOptions {
  int max_iter = 20000;
  double tol_grad_rel = 1e-8;  // x max(1, ||C||_F)
  double tol_eig_rel = 1e-8;   // x Hessian spectral scale
  std::uint64_t rng_seed = kDefaultSeed;
  double armijo = 1e-4;
  double shrink = 0.5;
  int max_halvings = 60;
  int max_polish = 2000;  // gradient-norm polish iterations near stationarity
  bool record_steps = true;
};

struct DescentStep {
  int iter = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
  char event = 'g';  // 'g' gradient step, 'e' eigenvector escape, 'p' polish
};

struct DescentTrace {
  std::vector<DescentStep> steps;
  Matrix terminal_V;
  double terminal_objective = 0.0;
  double terminal_grad_norm = 0.0;
  std::optional<SecondOrderReport> terminal_report;
  int grad_steps = 0;
  int escape_steps = 0;
  int polish_steps = 0;
  bool converged = false;  // terminal report passed
  bool max_iter_exceeded = false;
  std::uint64_t rng_seed = 0;
};

// Backtracking descent; once the line search bottoms out, fixed-step polish
// iterations (accepted on gradient-norm decrease, so they are immune to the
// objective's arithmetic resolution) finish the convergence, then the
// restricted Hessian is checked and strictly negative directions are followed
// until the second-order report passes. The trace objective is non-increasing
// across accepted steps up to roundoff.
DescentTrace descend(const SdpInstance& inst, const Matrix& C,
                     const Matrix& V0, const DescentOptions& opts = {},
                     const Tolerances& tols = {});

// min over orthogonal Q of ||W - V Q||_F.
double procrustes_distance(const Matrix& W, const Matrix& V);

struct BasinSeedResult {
  std::uint64_t seed_index = 0;
  double objective = 0.0;
  bool reached_global = false;    // needs truth
  bool trapped = false;           // needs V_spurious
  bool certified_global = false;  // rounded-terminal KKT certificate VALID
  double rel_duality_gap = 0.0;
  double procrustes_dist = -1.0;
  bool second_order_ok = false;
  int iterations = 0;
};

struct BasinSummary {
  int num_seeds = 0;
  double fraction_global = 0.0;
  double fraction_trapped = 0.0;
  double fraction_certified = 0.0;
  double fraction_other = 0.0;  // neither global nor trapped
  std::vector<BasinSeedResult> per_seed;
  std::uint64_t rng_seed = 0;
};

// Runs descend from num_seeds random feasible starts (independent per-seed
// rng streams derived from rng_seed, so results are schedule-independent).
// truth enables the objective-based global classification; V_spurious enables
// the distance-to-orbit trap classification (threshold 1e-4 ||V_spurious||).
BasinSummary basin_experiment(const SdpInstance& inst, const Matrix& C,
                              const std::optional<GroundTruth>& truth,
                              const std::optional<Matrix>& V_spurious, int p,
                              int num_seeds, std::uint64_t rng_seed,
                              const DescentOptions& opts = {},
                              const Tolerances& tols = {});

}  // namespace bmforge
