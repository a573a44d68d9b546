// Global-optimality certificates: KKT pairs (g1, C1), strict complementary
// slackness, extremality of the planted optimum, and the optimality gap of a
// candidate spurious point.
#pragma once

#include "bmforge/sdp.hpp"
#include "bmforge/types.hpp"

#include <optional>
#include <string>

namespace bmforge {

enum class Verdict { VALID, INVALID, UNVERIFIED };

std::string verdict_name(Verdict v);

struct ExtremeReport {
  bool extreme = false;
  int nullity = 0;  // dim of the symmetric S with A(U0 S U0^T) = 0
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double tolerance = 0.0;
};

// Planted optimum X0 = U0 U0^T with rank r and extremality diagnostics.
struct GroundTruth {
  Matrix U0;
  SymMatrix X0;
  int r = 0;
  ExtremeReport extremality;
};

// X0 is extreme in the feasible set iff S -> A(U0 S U0^T) has trivial kernel
// over symmetric r x r matrices (full column rank of the m x r(r+1)/2 map).
ExtremeReport check_extreme_point(const SdpInstance& inst, const Matrix& U0,
                                  const Tolerances& tols = {});

GroundTruth make_ground_truth(const SdpInstance& inst, const Matrix& U0,
                              const Tolerances& tols = {});

struct KktCertificate {
  Vector g1;
  SymMatrix C1;  // C - A*(g1)
  double min_eig_C1 = 0.0;
  int rank_C1 = 0;
  double compl_residual = 0.0;  // ||C1 X0||_F
  bool strict = false;          // rank_C1 == n - r
  double duality_gap = 0.0;     // |<g1, b> - <C, X0>|
  Verdict verdict = Verdict::UNVERIFIED;
  bool candidate_supplied = false;
  double solve_residual = 0.0;  // residual of the multiplier recovery solve
  // strict + extreme X0 certify a unique SDP solution.
  bool uniqueness_certified = false;
};

// With candidate_g1 the certificate is judged strictly VALID/INVALID; without
// it the multiplier is recovered from (C - A*(g)) U0 = 0 in least-norm form
// and a failed check yields UNVERIFIED (the least-norm slice does not
// characterize all multipliers, so failure is not a disproof).
KktCertificate kkt_certificate(const SdpInstance& inst, const Matrix& C,
                               const GroundTruth& truth,
                               const std::optional<Vector>& candidate_g1 = {},
                               const Tolerances& tols = {});

// <C, VV^T> - <C, X0>.
double optimality_gap(const SdpInstance& inst, const Matrix& C,
                      const GroundTruth& truth, const Matrix& V);

}  // namespace bmforge
