// Problem-family constructors (unit-diagonal cut relaxation, per-block
// orthogonality, product of spheres) with their planted (X0, V) pairs, plus
// two hardcoded counterexample fixtures.
#pragma once

#include "bmforge/certify.hpp"
#include "bmforge/sdp.hpp"
#include "bmforge/types.hpp"

#include <cstdint>
#include <vector>

namespace bmforge {

struct BadPair {
  GroundTruth truth;
  FactorPoint point;
};

// diag(X) = 1: A_i = e_i e_i^T, b = 1.
SdpInstance maxcut_instance(int n);

// X0 = ones * ones^T (r = 1); V rows e_i, -e_i, (e_i + e_j)/sqrt(2) over
// lexicographic pairs i < j, then filler rows e_1. Requires
// p(p+1)/2 + p <= n (throws ThresholdViolation otherwise).
BadPair maxcut_bad_pair(int n, int p);

// S diagonal blocks of size d, Block_s(X) = I_d: m = S d(d+1)/2 constraints
// extracting each block's upper triangle.
SdpInstance orthocut_instance(int S, int d);

// X0 = stacked identities (r = d). d = 1 delegates to the diagonal family;
// d = 2 uses the explicit 2 x p row-block tables (three branches by p mod 3);
// d = 3 samples Haar orthonormal-row blocks until the min-secant checker
// accepts (throws SearchExhausted past max_attempts). Requires p >= d and
// p(p+1)/2 + pd <= S d(d+1)/2.
BadPair orthocut_bad_pair(int S, int d, int p,
                          std::uint64_t seed = kDefaultSeed,
                          int max_attempts = 100,
                          int* attempts_used = nullptr);

// Block-trace constraints: sum of the diagonal inside block s equals 1.
SdpInstance spheres_instance(const std::vector<int>& dims);

// Lifts the diagonal-family pair with S = #blocks through the row-insertion
// operator (row s lands on the first row of block s). Requires
// p(p+1)/2 + p <= S.
BadPair spheres_bad_pair(const std::vector<int>& dims, int p);

// Row-insertion operator used by the spheres family.
Matrix insert_rows(const Matrix& M, const std::vector<int>& dims);

// Hardcoded 6 x 6 diagonal-constraint fixture with a rank-2 planted optimum
// and a known spurious rank-2 second-order point; all entries are exact
// sqrt(5) expressions evaluated in double precision.
struct AppendixCFixture {
  SdpInstance instance;
  CostMatrix C;
  GroundTruth truth;
  FactorPoint point;
  Vector g1;
  Vector g2;  // zero
};

AppendixCFixture appendix_c_fixture();

// Parameterized counterexample family on first-row constraints
// A(X) = (X_{1,1}, X_{1,n-m+2}, ..., X_{1,n}), b = e_1: carries an explicit
// tangent direction that breaks min-secancy property 3 whenever w1 != u
// (and property 2 when w1 = u).
struct AppendixBFixture {
  SdpInstance instance;
  GroundTruth truth;  // X0 from x0 = (1, u, 0)
  FactorPoint point;  // V from rows (1,0), (w1 w2), 0
  Vector u, w1, w2;
  Matrix violating_direction;  // n x 2, first column carries w1 - u
};

// Requires 5 <= m <= n. With w1_equals_u the w1 vector is set to u exactly.
AppendixBFixture appendix_b_counterexample(int n, int m,
                                           bool w1_equals_u = false,
                                           std::uint64_t seed = kDefaultSeed);

}  // namespace bmforge
