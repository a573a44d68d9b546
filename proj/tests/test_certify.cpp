// Unit suite for dual certification: extremality, ground-truth assembly,
// KKT certificates with planted and tampered multipliers, closed-form dual
// matrices for the hardcoded fixture, and optimality gaps.
#include "bmforge/certify.hpp"
#include "bmforge/families.hpp"
#include "bmforge/sdp.hpp"
#include "bmforge/types.hpp"

#include <doctest.h>

#include <cmath>

#include "oracles.hpp"

using namespace bmforge;

namespace {

// Independent reconstruction of the dual slack matrix of the hardcoded
// fixture: congruence transform of an explicitly tabulated 6 x 6 core.
Matrix fixture_c1_oracle(const AppendixCFixture& fx) {
  const double s5 = std::sqrt(5.0);
  Matrix G(6, 6);
  G.leftCols(2) = fx.point.V;
  G.middleCols(2, 2) = fx.truth.U0;
  G.col(4) = Vector::Unit(6, 0);
  G.col(5) = Vector::Unit(6, 1);
  Matrix core = Matrix::Zero(6, 6);
  core(0, 0) = 6.0 / 5.0;
  core(0, 1) = core(1, 0) = 6.0 / 5.0;
  core(1, 1) = 14.0 / 5.0 + 2.0 / s5;
  core(1, 4) = core(4, 1) = s5;
  core(1, 5) = core(5, 1) = 2.0 - 3.0 / s5;
  core(4, 4) = 20.0;
  core(5, 5) = 20.0;
  const Matrix Ginv = G.fullPivLu().inverse();
  return Ginv.transpose() * core * Ginv;
}

}  // namespace

TEST_SUITE("certify") {
  TEST_CASE("rank-one all-ones optimum is extreme for unit-diagonal constraints") {
    const SdpInstance inst = maxcut_instance(5);
    const ExtremeReport rep =
        check_extreme_point(inst, Matrix::Ones(5, 1));
    CHECK(rep.extreme);
    CHECK(rep.nullity == 0);
    CHECK(rep.sigma_min > rep.tolerance);
    CHECK_THROWS_AS((void)check_extreme_point(inst, Matrix::Ones(4, 1)),
                    DimensionMismatch);
  }

  TEST_CASE("identity factor is maximally non-extreme") {
    const SdpInstance inst = maxcut_instance(5);
    const ExtremeReport rep = check_extreme_point(inst, Matrix::Identity(5, 5));
    CHECK(!rep.extreme);
    // S -> diag(S) has the off-diagonal symmetric matrices as kernel.
    CHECK(rep.nullity == 10);
  }

  TEST_CASE("ground truth validates column rank") {
    const SdpInstance inst = maxcut_instance(5);
    const GroundTruth truth = make_ground_truth(inst, Matrix::Ones(5, 1));
    CHECK(truth.r == 1);
    CHECK((truth.X0.mat - Matrix::Ones(5, 5)).norm() == doctest::Approx(0.0));
    Matrix bad(5, 2);
    bad.col(0).setOnes();
    bad.col(1).setOnes();  // duplicated column: rank 1, not 2
    CHECK_THROWS_AS((void)make_ground_truth(inst, bad), Error);
  }

  TEST_CASE("fixture ground truth is extreme of rank two") {
    const AppendixCFixture fx = appendix_c_fixture();
    CHECK(fx.truth.r == 2);
    CHECK(fx.truth.extremality.extreme);
  }

  TEST_CASE("supplied multiplier certifies the fixture") {
    const AppendixCFixture fx = appendix_c_fixture();
    const KktCertificate cert =
        kkt_certificate(fx.instance, fx.C.C.mat, fx.truth, fx.g1);
    CHECK(cert.candidate_supplied);
    CHECK(cert.verdict == Verdict::VALID);
    CHECK(cert.min_eig_C1 >= -1e-10 * fx.C.C.mat.norm());
    CHECK(cert.rank_C1 == 4);
    CHECK(cert.strict);
    CHECK(cert.compl_residual <= 1e-10 * fx.C.C.mat.norm());
    CHECK(cert.duality_gap <= 1e-10 * std::max(1.0, std::abs(objective(
                                  fx.C.C.mat, fx.truth.X0.mat))));
    CHECK(cert.uniqueness_certified);
  }

  TEST_CASE("least-norm recovery reproduces the fixture multiplier") {
    const AppendixCFixture fx = appendix_c_fixture();
    const KktCertificate cert =
        kkt_certificate(fx.instance, fx.C.C.mat, fx.truth);
    CHECK(!cert.candidate_supplied);
    CHECK(cert.verdict == Verdict::VALID);
    CHECK(cert.solve_residual <= 1e-9 * std::max(1.0, fx.C.C.mat.norm()));
    // All rows of U0 are nonzero, so the complementarity system pins g1 down
    // uniquely and the recovery must land on the published multiplier.
    CHECK((cert.g1 - fx.g1).norm() <= 1e-9 * std::max(1.0, fx.g1.norm()));
  }

  TEST_CASE("dual slack matches its published closed form") {
    const AppendixCFixture fx = appendix_c_fixture();
    const KktCertificate cert =
        kkt_certificate(fx.instance, fx.C.C.mat, fx.truth, fx.g1);
    const Matrix oracle = fixture_c1_oracle(fx);
    CHECK((cert.C1.mat - oracle).norm() <= 1e-12 * oracle.norm());
    // And the slack annihilates the planted optimum from both sides.
    CHECK((oracle * fx.truth.U0).norm() <= 1e-12 * oracle.norm());
  }

  TEST_CASE("a tampered multiplier is judged INVALID") {
    const AppendixCFixture fx = appendix_c_fixture();
    Vector tampered = fx.g1;
    tampered(2) += 1.0;
    const KktCertificate cert =
        kkt_certificate(fx.instance, fx.C.C.mat, fx.truth, tampered);
    CHECK(cert.verdict == Verdict::INVALID);
    CHECK(cert.compl_residual > 1e-3);
  }

  TEST_CASE("recovery failure without a candidate stays UNVERIFIED") {
    // Optimum of <C, X> over the n = 2 elliptope for this off-diagonal C is
    // not the all-ones matrix, so no valid multiplier exists at it.
    const SdpInstance inst = maxcut_instance(2);
    Matrix C(2, 2);
    C << 0.0, 1.0, 1.0, 0.0;
    const GroundTruth truth = make_ground_truth(inst, Matrix::Ones(2, 1));
    const KktCertificate recovered = kkt_certificate(inst, C, truth);
    CHECK(recovered.verdict == Verdict::UNVERIFIED);
    CHECK(recovered.min_eig_C1 < 0.0);
    Vector candidate(2);
    candidate << 1.0, 1.0;
    const KktCertificate judged = kkt_certificate(inst, C, truth, candidate);
    CHECK(judged.verdict == Verdict::INVALID);
  }

  TEST_CASE("infeasible planted optimum is rejected outright") {
    const SdpInstance inst = maxcut_instance(3);
    const GroundTruth truth =
        make_ground_truth(inst, 2.0 * Matrix::Ones(3, 1));
    CHECK_THROWS_AS(
        (void)kkt_certificate(inst, Matrix::Identity(3, 3), truth), Error);
  }

  TEST_CASE("shape validation") {
    const AppendixCFixture fx = appendix_c_fixture();
    CHECK_THROWS_AS((void)kkt_certificate(fx.instance, Matrix::Zero(5, 5),
                                          fx.truth),
                    DimensionMismatch);
    CHECK_THROWS_AS((void)kkt_certificate(fx.instance, fx.C.C.mat, fx.truth,
                                          Vector::Zero(4)),
                    DimensionMismatch);
    CHECK_THROWS_AS(
        (void)optimality_gap(fx.instance, fx.C.C.mat, fx.truth,
                             Matrix::Zero(5, 2)),
        DimensionMismatch);
  }

  TEST_CASE("fixture optimality gap equals its closed form") {
    const AppendixCFixture fx = appendix_c_fixture();
    const double s5 = std::sqrt(5.0);
    const double expected = s5 + 4.0 - 3.0 / s5;  // 4.894427190999916
    CHECK(optimality_gap(fx.instance, fx.C.C.mat, fx.truth, fx.point.V) ==
          doctest::Approx(expected).epsilon(1e-12));
    // The spurious point sits at objective zero for this cost.
    CHECK(std::abs(objective(fx.C.C.mat,
                             fx.point.V * fx.point.V.transpose())) <= 1e-10);
  }

  TEST_CASE("verdict names") {
    CHECK(verdict_name(Verdict::VALID) == "VALID");
    CHECK(verdict_name(Verdict::INVALID) == "INVALID");
    CHECK(verdict_name(Verdict::UNVERIFIED) == "UNVERIFIED");
  }
}
