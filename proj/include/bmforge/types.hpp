// Shared scalar aliases, tolerance bundle, error hierarchy and deterministic
// random-number helpers used across the library.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bmforge {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kToolName = "bmforge";

// Default seed used wherever a deterministic randomized construction needs one.
inline constexpr std::uint64_t kDefaultSeed = 20260819ull;

// All thresholds are relative to a problem-dependent scale unless noted.
// Every report that applies one of these embeds the value it used.
struct Tolerances {
  // p-regularity: m-th singular value of the constraint differential must
  // exceed regularity_rel * sigma_max.
  double regularity_rel = 1e-8;
  // Rank cutoffs for certificate matrices (count |lambda| > rank_rel * |lambda|_max).
  double rank_rel = 1e-7;
  // Rank cutoffs for subspace bases (null spaces, stacked-basis intersections).
  double basis_rank_rel = 1e-8;
  // Restricted-Hessian eigenvalue zero classification: |lambda| <= eig_zero_rel * max(1, spectral scale).
  double eig_zero_rel = 1e-7;
  // PSD verdicts: min eigenvalue >= -psd_rel * scale.
  double psd_rel = 1e-8;
  // First-order criticality: ||C2 V||_F <= crit_rel * ||C||_F.
  double crit_rel = 1e-8;
  // Pseudo-inverse singular-value cutoff for least-norm solves: pinv_rel * sigma_max.
  double pinv_rel = 1e-10;
  // Residual acceptance for linear solves that must be consistent.
  double solve_rel = 1e-9;
  // Feasibility residual ceiling for points claimed to lie on the manifold.
  double feas_tol = 1e-10;
  // Line-search monotonicity slack (times objective scale).
  double linesearch_rel = 1e-12;

  // Profile from BMFORGE_TOL_PROFILE: "default", "strict" (x0.1 on verdict
  // thresholds), "loose" (x10). Unknown values fall back to default.
  static Tolerances from_profile(const std::string& profile);
  static Tolerances from_env();
};

// ---- Error hierarchy -------------------------------------------------------

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Shapes of inputs disagree with the instance dimensions.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// The constraint differential at V is not surjective.
class NotRegular : public Error {
 public:
  using Error::Error;
};

// Columns of [U0 V] fail to be linearly independent.
class DependentColumns : public Error {
 public:
  using Error::Error;
};

// A linear system that must be consistent has a large residual.
class SystemInconsistent : public Error {
 public:
  using Error::Error;
};

// The (2,2) block extracted from the multiplier is not negative definite.
class G3NotNegDef : public Error {
 public:
  using Error::Error;
};

// The shift quadratic form is not positive definite on the horizontal space.
class ShiftNotPD : public Error {
 public:
  using Error::Error;
};

// A second-order report was requested at a point that is not first-order critical.
class NotFirstOrderCritical : public Error {
 public:
  using Error::Error;
};

// The generic feasibility projection failed to converge.
class ProjectionDiverged : public Error {
 public:
  using Error::Error;
};

// A randomized construction exhausted its attempt budget.
class SearchExhausted : public Error {
 public:
  using Error::Error;
};

// A family constructor was called outside its admissible parameter range.
class ThresholdViolation : public Error {
 public:
  using Error::Error;
};

// A pipeline precondition failed; carries the stage that rejected it.
class PreconditionFailed : public Error {
 public:
  PreconditionFailed(std::string stage, const std::string& msg)
      : Error("[" + stage + "] " + msg), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// ---- Deterministic randomness ----------------------------------------------

// Wraps mt19937_64 but derives all floating-point variates from its
// standardized bit stream directly, so identical seeds give identical
// sequences on every platform (stdlib distribution sequences are
// implementation-defined and would break byte-level reproducibility).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // Independent stream for sub-experiment `stream` of a seeded run.
  static Rng derive(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t bits();
  double uniform();   // [0, 1)
  double gaussian();  // standard normal (Box-Muller)

  Matrix gaussian_matrix(int rows, int cols);
  Matrix symmetric_gaussian(int order);
  // Haar-distributed k x k orthogonal matrix (QR with R-diagonal sign fix).
  Matrix haar_orthogonal(int order);

 private:
  std::uint64_t next_raw();
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// ---- Small shared helpers ---------------------------------------------------

// Column-major flattening of an n x p matrix (and its inverse).
Vector vec(const Matrix& M);
Matrix unvec(const Vector& v, int rows, int cols);

// Frobenius inner product.
double inner(const Matrix& A, const Matrix& B);

// Least-norm least-squares solve via SVD with relative cutoff.
Vector pinv_solve(const Matrix& A, const Vector& rhs, double pinv_rel);

// Deterministic sign convention for basis columns: the first entry whose
// magnitude exceeds 1e-12 * max|entry| is made positive.
void fix_column_signs(Matrix& basis);

}  // namespace bmforge
