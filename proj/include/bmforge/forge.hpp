// Cost forging pipeline: given (A, b), a planted extreme optimum X0 = U0 U0^T
// and a minimally-secant factor V, construct a cost matrix C whose SDP has X0
// as certified unique global minimizer while V is a certified non-degenerate
// spurious second-order critical point of the factorized problem.
#pragma once

#include "bmforge/certify.hpp"
#include "bmforge/manifold.hpp"
#include "bmforge/minsecant.hpp"
#include "bmforge/sdp.hpp"
#include "bmforge/types.hpp"

namespace bmforge {

// Instance rewritten in the basis G = [U0 V W]: A~_i = G^T A_i G, so that
// X0 and V become the canonical block matrices [[I_r,0],[0,0]] and [0;I_p;0].
struct TransformedInstance {
  SdpInstance inst;
  Matrix G;
  double cond_G = 0.0;
  int r = 0;
  int p = 0;
  Matrix X0_t;  // canonical transformed optimum
  Matrix V_t;   // canonical transformed factor
};

// Throws DependentColumns when [U0 V] is column-rank deficient.
TransformedInstance change_of_basis(const SdpInstance& inst,
                                    const GroundTruth& truth, const Matrix& V,
                                    const Tolerances& tols = {});

struct G1Solution {
  Vector g1;
  double residual = 0.0;
  // Blocks of A~*(g1) in the (r, p, n-r-p) partition:
  // [[G1, R1, G2], [R1^T, G3, G4], [G2^T, G4^T, G5]].
  Matrix G1, G2, G3, G4, G5;
  Matrix R1, R2;  // prescribed: R1 = 0 (r x p), R2 = -I_p (the solved G3)
};

// Least-norm solve of the linear system prescribing the (1,2) and (2,2)
// blocks of A~*(g1) to (0, -I_p). Throws SystemInconsistent when the residual
// exceeds solve_rel * scale (e.g. the pair is not minimally secant).
G1Solution solve_g1(const TransformedInstance& ti, const Tolerances& tols = {});

struct D1Completion {
  Matrix D1;  // [[-G3, -G4], [-G4^T, lambda I]], positive definite
  double lambda = 0.0;
};

// lambda = max(0, lambda_max(G4^T (-G3)^{-1} G4)) + margin (Schur-complement
// threshold). Throws G3NotNegDef when -G3 is not positive definite.
D1Completion build_D1(const Matrix& G3, const Matrix& G4, double margin);

struct TShift {
  double t = 0.0;
  Matrix C1_mod;  // C1~ + t * blockdiag(0_{r+p}, I_{n-r-p})
  Matrix C2_mod;
  Vector horizontal_spectrum_after;  // eigenvalues of Q_C2 + t Q_shift
};

// Picks t = max(0, largest generalized eigenvalue of (-Q_C2, Q_shift)) +
// margin, where both forms are restricted to the horizontal space at V~.
// Throws ShiftNotPD when the shift form is not PD there (min-secancy broken).
TShift build_t_shift(const TransformedInstance& ti, const Matrix& C1_t,
                     const Matrix& C2_t, double margin,
                     const Tolerances& tols = {});

struct ForgeIntermediates {
  Matrix G;
  double cond_G = 0.0;
  Vector g1;
  double solve_residual = 0.0;
  Matrix G1, G2, G3, G4, G5;
  Matrix R1, R2;
  Matrix D1;
  double lambda = 0.0;
  Matrix F1, F2, F3;  // blocks of C2~ = A~*(g1) + C1~
  double t = 0.0;
  Matrix C1_t, C2_t;          // transformed certificates before the shift
  Matrix C1_mod_t, C2_mod_t;  // after the shift
  Vector g2_transformed;      // identically zero by construction
};

struct ForgeMargins {
  double lambda_margin = 1.0;
  double t_margin = 1.0;
};

struct ForgeResult {
  CostMatrix C;  // original coordinates
  Matrix C1;
  Vector g1;
  Vector g2;  // recomputed in original coordinates (stays ~0)
  ForgeIntermediates intermediates;
  KktCertificate kkt;
  FirstOrderCertificate first_order;
  SecondOrderReport second_order;
  MinSecantReport min_secant;
  double gap = 0.0;  // <C, VV^T> - <C, X0>, strictly positive
};

// Full pipeline with stage-labelled precondition errors; attaches all
// certificates recomputed from scratch in original coordinates and requires
// them VALID (gap > 0, non-degenerate second order).
ForgeResult forge(const SdpInstance& inst, const GroundTruth& truth,
                  const Matrix& V, const ForgeMargins& margins = {},
                  const Tolerances& tols = {});

}  // namespace bmforge
