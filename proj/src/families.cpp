#include "bmforge/families.hpp"

#include "bmforge/minsecant.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numeric>
#include <string>

namespace bmforge {

namespace {

// Builds the diagonal-family bad pair against a caller-supplied instance so
// the unit-block orthogonality family can reuse it verbatim for d = 1.
BadPair diagonal_pair_for(const SdpInstance& inst, int n, int p) {
  const int special = p * (p + 1) / 2 + p;
  if (special > n)
    throw ThresholdViolation("diagonal family needs p(p+1)/2 + p = " +
                             std::to_string(special) +
                             " <= n = " + std::to_string(n));

  Matrix V = Matrix::Zero(n, p);
  int row = 0;
  for (int i = 0; i < p; ++i) V(row++, i) = 1.0;
  for (int i = 0; i < p; ++i) V(row++, i) = -1.0;
  const double isqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) {
      V(row, i) = isqrt2;
      V(row, j) = isqrt2;
      ++row;
    }
  for (; row < n; ++row) V(row, 0) = 1.0;

  BadPair pair;
  pair.truth = make_ground_truth(inst, Matrix::Ones(n, 1));
  pair.point = make_factor_point(inst, V);
  return pair;
}

}  // namespace

SdpInstance maxcut_instance(int n) {
  if (n < 1) throw DimensionMismatch("maxcut_instance: n must be positive");
  std::vector<Matrix> A;
  A.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Matrix Ai = Matrix::Zero(n, n);
    Ai(i, i) = 1.0;
    A.push_back(Ai);
  }
  return make_instance(A, Vector::Ones(n), Family::maxcut);
}

BadPair maxcut_bad_pair(int n, int p) {
  return diagonal_pair_for(maxcut_instance(n), n, p);
}

SdpInstance orthocut_instance(int S, int d) {
  if (S < 1 || d < 1)
    throw DimensionMismatch("orthocut_instance: S and d must be positive");
  const int n = S * d;
  std::vector<Matrix> A;
  Vector b(S * d * (d + 1) / 2);
  int idx = 0;
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < d; ++a)
      for (int c = a; c < d; ++c) {
        Matrix Ai = Matrix::Zero(n, n);
        const int k = s * d + a;
        const int l = s * d + c;
        if (a == c) {
          Ai(k, k) = 1.0;
          b(idx) = 1.0;
        } else {
          Ai(k, l) = 0.5;
          Ai(l, k) = 0.5;
          b(idx) = 0.0;
        }
        A.push_back(Ai);
        ++idx;
      }
  return make_instance(A, b, Family::orthocut, std::vector<int>(S, d));
}

namespace {

// 2 x 3 generator blocks for the d = 2 orthogonality family.
struct RowBlockTables {
  std::vector<Matrix> G, H, J;
  RowBlockTables() {
    const double s2 = 1.0 / std::sqrt(2.0);
    const double s3 = 1.0 / std::sqrt(3.0);
    G.assign(4, Matrix::Zero(2, 3));
    G[0] << 1, 0, 0, 0, 1, 0;
    G[1] << 0, 1, 0, 0, 0, 1;
    G[2] << 0, 0, 1, s2, s2, 0;
    G[3] << 0, s2, s2, s3, s3, -s3;
    H.assign(6, Matrix::Zero(2, 4));
    H[0] << 1, 0, 0, 0, 0, 1, 0, 0;
    H[1] << 0, 1, 0, 0, 0, 0, 1, 0;
    H[2] << 0, 0, 1, 0, 0, 0, 0, 1;
    H[3] << 0, 0, 0, 1, 1, 0, 0, 0;
    H[4] << s2, s2, 0, 0, 0, 0, s2, s2;
    H[5] << 0, 0, s2, -s2, 0.6, 0.8, 0, 0;
    J.assign(3, Matrix::Zero(2, 2));
    J[0] << 1, 0, 0, 1;
    J[1] << 0, 1, -1, 0;
    J[2] << s2, s2, s2, -s2;
  }
};

enum class GroupKind { G, H, J };

struct Group {
  GroupKind kind;
  int offset;  // starting column inside the p columns
  int width;
};

// Splits the p columns into generator groups per p mod 3.
std::vector<Group> column_groups(int p) {
  std::vector<Group> groups;
  int num_g = 0;
  if (p % 3 == 0) {
    num_g = p / 3;
  } else if (p % 3 == 1) {
    num_g = (p - 4) / 3;
  } else {
    num_g = (p - 2) / 3;
  }
  for (int q = 0; q < num_g; ++q) groups.push_back({GroupKind::G, 3 * q, 3});
  if (p % 3 == 1) groups.push_back({GroupKind::H, p - 4, 4});
  if (p % 3 == 2) groups.push_back({GroupKind::J, p - 2, 2});
  return groups;
}

const std::vector<Matrix>& table_for(const RowBlockTables& t, GroupKind k) {
  switch (k) {
    case GroupKind::G: return t.G;
    case GroupKind::H: return t.H;
    default: return t.J;
  }
}

BadPair orthocut_pair_d2(const SdpInstance& inst, int S, int p) {
  static const RowBlockTables tables;
  const std::vector<Group> groups = column_groups(p);

  std::vector<Matrix> blocks;  // 2 x p row-blocks of V, in order
  for (const Group& g : groups)
    for (const Matrix& member : table_for(tables, g.kind)) {
      Matrix blk = Matrix::Zero(2, p);
      blk.middleCols(g.offset, g.width) = member;
      blocks.push_back(blk);
    }

  // Cross blocks mixing two groups; the pair tables are keyed by the second
  // group's kind (the first group is always a 3-wide one).
  const double s2 = 1.0 / std::sqrt(2.0);
  for (std::size_t a = 0; a < groups.size(); ++a)
    for (std::size_t c = a + 1; c < groups.size(); ++c) {
      const Group& ga = groups[a];
      const Group& gc = groups[c];
      std::vector<std::pair<int, int>> pairs;
      switch (gc.kind) {
        case GroupKind::G: pairs = {{0, 0}, {1, 2}, {3, 1}}; break;
        case GroupKind::H: pairs = {{0, 0}, {0, 2}, {1, 0}, {1, 2}}; break;
        default: pairs = {{0, 0}, {1, 0}}; break;
      }
      for (const auto& [ia, ic] : pairs) {
        Matrix blk = Matrix::Zero(2, p);
        blk.middleCols(ga.offset, ga.width) = s2 * tables.G[static_cast<std::size_t>(ia)];
        blk.middleCols(gc.offset, gc.width) =
            s2 * table_for(tables, gc.kind)[static_cast<std::size_t>(ic)];
        blocks.push_back(blk);
      }
    }

  if (static_cast<int>(blocks.size()) > S)
    throw Error("d = 2 construction produced " +
                std::to_string(blocks.size()) + " blocks for S = " +
                std::to_string(S));
  Matrix filler = Matrix::Zero(2, p);
  filler.leftCols(2) = Matrix::Identity(2, 2);
  while (static_cast<int>(blocks.size()) < S) blocks.push_back(filler);

  Matrix V(2 * S, p);
  for (int s = 0; s < S; ++s)
    V.middleRows(2 * s, 2) = blocks[static_cast<std::size_t>(s)];

  Matrix U0(2 * S, 2);
  for (int s = 0; s < S; ++s)
    U0.middleRows(2 * s, 2) = Matrix::Identity(2, 2);

  BadPair pair;
  pair.truth = make_ground_truth(inst, U0);
  pair.point = make_factor_point(inst, V);
  return pair;
}

}  // namespace

BadPair orthocut_bad_pair(int S, int d, int p, std::uint64_t seed,
                          int max_attempts, int* attempts_used) {
  if (p < d)
    throw ThresholdViolation("orthogonality family needs p >= d (got p = " +
                             std::to_string(p) + ", d = " + std::to_string(d) +
                             ")");
  const int need = p * (p + 1) / 2 + p * d;
  const int m = S * d * (d + 1) / 2;
  if (need > m)
    throw ThresholdViolation("orthogonality family needs p(p+1)/2 + pd = " +
                             std::to_string(need) +
                             " <= S d(d+1)/2 = " + std::to_string(m));
  if (attempts_used) *attempts_used = 0;

  const SdpInstance inst = orthocut_instance(S, d);
  if (d == 1) return diagonal_pair_for(inst, S, p);
  if (d == 2) return orthocut_pair_d2(inst, S, p);

  const int n = S * d;
  Matrix U0(n, d);
  for (int s = 0; s < S; ++s)
    U0.middleRows(s * d, d) = Matrix::Identity(d, d);
  BadPair pair;
  pair.truth = make_ground_truth(inst, U0);

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(attempt));
    Matrix V(n, p);
    for (int s = 0; s < S; ++s)
      V.middleRows(s * d, d) = rng.haar_orthogonal(p).topRows(d);
    if (attempts_used) *attempts_used = attempt + 1;
    try {
      const MinSecantReport ms = check_min_secant(inst, pair.truth, V);
      if (!ms.verdict) continue;
    } catch (const Error&) {
      continue;
    }
    pair.point = make_factor_point(inst, V);
    return pair;
  }
  throw SearchExhausted("no minimally secant sample in " +
                        std::to_string(max_attempts) + " attempts (S = " +
                        std::to_string(S) + ", d = " + std::to_string(d) +
                        ", p = " + std::to_string(p) + ")");
}

SdpInstance spheres_instance(const std::vector<int>& dims) {
  if (dims.empty())
    throw DimensionMismatch("spheres_instance: need at least one block");
  for (int d : dims)
    if (d < 1)
      throw DimensionMismatch("spheres_instance: block sizes must be positive");
  const int S = static_cast<int>(dims.size());
  const int n = std::accumulate(dims.begin(), dims.end(), 0);
  std::vector<Matrix> A;
  int offset = 0;
  for (int s = 0; s < S; ++s) {
    Matrix As = Matrix::Zero(n, n);
    for (int k = 0; k < dims[static_cast<std::size_t>(s)]; ++k)
      As(offset + k, offset + k) = 1.0;
    offset += dims[static_cast<std::size_t>(s)];
    A.push_back(As);
  }
  return make_instance(A, Vector::Ones(S), Family::spheres, dims);
}

Matrix insert_rows(const Matrix& M, const std::vector<int>& dims) {
  if (M.rows() != static_cast<Eigen::Index>(dims.size()))
    throw DimensionMismatch("insert_rows: row count must equal #blocks");
  const int n = std::accumulate(dims.begin(), dims.end(), 0);
  Matrix out = Matrix::Zero(n, M.cols());
  int offset = 0;
  for (Eigen::Index s = 0; s < M.rows(); ++s) {
    out.row(offset) = M.row(s);
    offset += dims[static_cast<std::size_t>(s)];
  }
  return out;
}

BadPair spheres_bad_pair(const std::vector<int>& dims, int p) {
  const int S = static_cast<int>(dims.size());
  const int special = p * (p + 1) / 2 + p;
  if (special > S)
    throw ThresholdViolation("spheres family needs p(p+1)/2 + p = " +
                             std::to_string(special) +
                             " <= S = " + std::to_string(S));
  const SdpInstance inst = spheres_instance(dims);
  const SdpInstance flat = maxcut_instance(S);
  const BadPair base = diagonal_pair_for(flat, S, p);

  BadPair pair;
  pair.truth = make_ground_truth(inst, insert_rows(base.truth.U0, dims));
  pair.point = make_factor_point(inst, insert_rows(base.point.V, dims));
  return pair;
}

AppendixCFixture appendix_c_fixture() {
  const double s5 = std::sqrt(5.0);
  const double a = 2.0 / s5;
  const double c = 1.0 / s5;

  AppendixCFixture fx;
  fx.instance = maxcut_instance(6);

  Matrix V(6, 2);
  V << 0, 1, 0, 1, a, c, c, a, c, a, 0, 1;
  Matrix U0(6, 2);
  U0 << a, c, -1, 0, 1, 0, -1, 0, a, c, 0, 1;

  fx.g1 = Vector(6);
  fx.g1 << -s5, -2.0 + 3.0 / s5, -1.0, -2.0, 0.0, 1.0;
  fx.g2 = Vector::Zero(6);

  Matrix G(6, 6);
  G.leftCols(2) = V;
  G.middleCols(2, 2) = U0;
  G.col(4) = Vector::Unit(6, 0);
  G.col(5) = Vector::Unit(6, 1);

  Matrix P(6, 4);
  P.leftCols(2) = U0;
  P.col(2) = Vector::Unit(6, 0);
  P.col(3) = Vector::Unit(6, 1);

  Matrix inner = Matrix::Zero(6, 6);
  inner.bottomRightCorner(4, 4) = P.transpose() * fx.g1.asDiagonal() * P;
  inner.bottomRightCorner(2, 2) += 20.0 * Matrix::Identity(2, 2);

  const Matrix Gi = G.fullPivLu().inverse();
  const Matrix C_raw = Gi.transpose() * inner * Gi;
  fx.C.C = SymMatrix::from(0.5 * (C_raw + C_raw.transpose()));
  fx.C.provenance = "fixture";

  fx.truth = make_ground_truth(fx.instance, U0);
  fx.point = make_factor_point(fx.instance, V);
  return fx;
}

AppendixBFixture appendix_b_counterexample(int n, int m, bool w1_equals_u,
                                           std::uint64_t seed) {
  if (m < 5 || m > n)
    throw DimensionMismatch(
        "first-row counterexample needs 5 <= m <= n (got m = " +
        std::to_string(m) + ", n = " + std::to_string(n) + ")");
  std::vector<Matrix> A;
  Vector b = Vector::Zero(m);
  {
    Matrix A1 = Matrix::Zero(n, n);
    A1(0, 0) = 1.0;
    A.push_back(A1);
    b(0) = 1.0;
  }
  for (int k = 2; k <= m; ++k) {
    const int j = n - m + k - 1;  // zero-based column index
    Matrix Ak = Matrix::Zero(n, n);
    Ak(0, j) = 0.5;
    Ak(j, 0) = 0.5;
    A.push_back(Ak);
  }

  AppendixBFixture fx;
  fx.instance = make_instance(A, b);

  const int f = n - m;  // free coordinates
  fx.u = Rng::derive(seed, 0).gaussian_matrix(f, 1);
  fx.w1 = w1_equals_u ? fx.u : Vector(Rng::derive(seed, 1).gaussian_matrix(f, 1));
  fx.w2 = Rng::derive(seed, 2).gaussian_matrix(f, 1);

  Matrix U0 = Matrix::Zero(n, 1);
  U0(0, 0) = 1.0;
  U0.block(1, 0, f, 1) = fx.u;

  Matrix V = Matrix::Zero(n, 2);
  V(0, 0) = 1.0;
  V.block(1, 0, f, 1) = fx.w1;
  V.block(1, 1, f, 1) = fx.w2;

  fx.violating_direction = Matrix::Zero(n, 2);
  fx.violating_direction.block(1, 0, f, 1) = fx.w1 - fx.u;

  fx.truth = make_ground_truth(fx.instance, U0);
  fx.point = make_factor_point(fx.instance, V);
  return fx;
}

}  // namespace bmforge
