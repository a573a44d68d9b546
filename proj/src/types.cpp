#include "bmforge/types.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <cstdlib>

namespace bmforge {

Tolerances Tolerances::from_profile(const std::string& profile) {
  Tolerances t;
  double scale = 1.0;
  if (profile == "strict") {
    scale = 0.1;
  } else if (profile == "loose") {
    scale = 10.0;
  }
  t.regularity_rel *= scale;
  t.eig_zero_rel *= scale;
  t.psd_rel *= scale;
  t.crit_rel *= scale;
  return t;
}

Tolerances Tolerances::from_env() {
  const char* profile = std::getenv("BMFORGE_TOL_PROFILE");
  return from_profile(profile ? profile : "default");
}

// splitmix64: scrambles the seed/stream combination so that per-stream
// mt19937-style sequences are statistically independent.
namespace {
std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}
}  // namespace

Rng Rng::derive(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed ^ (0xA0761D6478BD642Full * (stream + 1));
  return Rng(splitmix64(x));
}

// xorshift-multiply generator over the splitmix-initialized state; fully
// specified here so sequences are identical on every platform.
std::uint64_t Rng::next_raw() { return splitmix64(state_); }

std::uint64_t Rng::bits() { return next_raw(); }

double Rng::uniform() {
  // 53 mantissa bits -> [0, 1).
  return static_cast<double>(next_raw() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

Matrix Rng::gaussian_matrix(int rows, int cols) {
  Matrix M(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) M(i, j) = gaussian();
  return M;
}

Matrix Rng::symmetric_gaussian(int order) {
  Matrix M = gaussian_matrix(order, order);
  return 0.5 * (M + M.transpose());
}

Matrix Rng::haar_orthogonal(int order) {
  const Matrix M = gaussian_matrix(order, order);
  Eigen::HouseholderQR<Matrix> qr(M);
  Matrix Q = qr.householderQ();
  const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < order; ++j)
    if (R(j, j) < 0) Q.col(j) = -Q.col(j);
  return Q;
}

Vector vec(const Matrix& M) {
  return Eigen::Map<const Vector>(M.data(), M.size());
}

Matrix unvec(const Vector& v, int rows, int cols) {
  if (v.size() != static_cast<Eigen::Index>(rows) * cols)
    throw DimensionMismatch("unvec: length " + std::to_string(v.size()) +
                            " != " + std::to_string(rows) + "x" +
                            std::to_string(cols));
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

double inner(const Matrix& A, const Matrix& B) {
  return (A.array() * B.array()).sum();
}

Vector pinv_solve(const Matrix& A, const Vector& rhs, double pinv_rel) {
  if (A.rows() != rhs.size())
    throw DimensionMismatch("pinv_solve: matrix rows != rhs length");
  if (A.cols() == 0) return Vector::Zero(0);
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? pinv_rel * s(0) : 0.0;
  Vector inv_s = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff) inv_s(i) = 1.0 / s(i);
  return svd.matrixV() * inv_s.asDiagonal() * (svd.matrixU().transpose() * rhs);
}

void fix_column_signs(Matrix& basis) {
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    const double scale = basis.col(j).cwiseAbs().maxCoeff();
    if (scale == 0.0) continue;
    for (Eigen::Index i = 0; i < basis.rows(); ++i) {
      if (std::abs(basis(i, j)) > 1e-12 * scale) {
        if (basis(i, j) < 0) basis.col(j) = -basis.col(j);
        break;
      }
    }
  }
}

}  // namespace bmforge
