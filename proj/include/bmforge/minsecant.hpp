// Minimal-secancy checker: the three-part range/tangent condition that makes
// the forge applicable at (X0, V), plus the counting-based dimension predictor.
#pragma once

#include "bmforge/certify.hpp"
#include "bmforge/sdp.hpp"
#include "bmforge/types.hpp"

namespace bmforge {

struct MinSecantReport {
  int rank_V = 0;
  int joint_rank = 0;   // rank of [U0 V]
  int tangent_dim = 0;  // np - m
  // dim of T_V intersected with {D : Range(D) in Range(X0) + Range(V)}.
  int range_constrained_dim = 0;
  int target_dim = 0;  // p(p-1)/2
  bool property1 = false;  // rank(V) = p
  bool property2 = false;  // Range(X0) and Range(V) intersect trivially
  bool property3 = false;  // range-constrained tangent directions are exactly {VK}
  bool verdict = false;    // all three
  double tolerance = 0.0;  // relative rank threshold used
};

// Throws NotRegular when V is not p-regular (the tangent dimension would be
// ill-defined). Intersection dimension is computed as
// dim(T) + dim(S) - rank([T_basis | S_basis]) over orthonormal bases.
MinSecantReport check_min_secant(const SdpInstance& inst,
                                 const GroundTruth& truth, const Matrix& V,
                                 const Tolerances& tols = {});

struct DimensionForecast {
  bool feasible = false;
  long slack = 0;  // m - p(p+1)/2 - p r
};

// Counting predictor: slack < 0 makes minimal secancy impossible, so the
// forge must reject. (Spurious points may still exist below the threshold;
// the predictor governs the forge precondition only.)
DimensionForecast dimension_predictor(long n, long m, long p, long r);

}  // namespace bmforge
