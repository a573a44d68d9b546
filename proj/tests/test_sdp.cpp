// Unit suite for the core data layer: symmetric-matrix hygiene, instance
// validation, the constraint map and its adjoint, feasibility checks,
// regularity diagnostics, pseudo-inverse solves, rng streams, tolerances.
#include "bmforge/families.hpp"
#include "bmforge/sdp.hpp"
#include "bmforge/types.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "oracles.hpp"

using namespace bmforge;

TEST_SUITE("sdp") {
  TEST_CASE("symmetric ingestion symmetrizes and reports asymmetry") {
    Matrix M(2, 2);
    M << 1.0, 2.0, 2.0 + 1e-9, 3.0;
    const SymMatrix S = SymMatrix::from(M);
    CHECK(S.mat(0, 1) == doctest::Approx(S.mat(1, 0)).epsilon(1e-15));
    CHECK(S.asymmetry > 0.0);
    CHECK(S.asymmetry < 1e-9);

    Matrix bad(2, 2);
    bad << 1.0, 2.0, 5.0, 3.0;
    CHECK_THROWS_AS((void)SymMatrix::from(bad), Error);

    Matrix rect(2, 3);
    rect.setZero();
    CHECK_THROWS_AS((void)SymMatrix::from(rect), Error);

    Matrix inf2(2, 2);
    inf2 << 1.0, 0.0, 0.0, std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS((void)SymMatrix::from(inf2), Error);
  }

  TEST_CASE("instance construction validates shapes") {
    std::vector<Matrix> A{Matrix::Identity(3, 3)};
    CHECK_THROWS_AS((void)make_instance(A, Vector::Ones(2)), Error);
    CHECK_THROWS_AS((void)make_instance({}, Vector(0)), Error);
    std::vector<Matrix> mixed{Matrix::Identity(3, 3), Matrix::Identity(2, 2)};
    CHECK_THROWS_AS((void)make_instance(mixed, Vector::Ones(2)), Error);
  }

  TEST_CASE("apply_A on the unit-diagonal family") {
    const SdpInstance inst = maxcut_instance(4);
    const Vector ones = apply_A(inst, Matrix::Identity(4, 4));
    CHECK((ones - Vector::Ones(4)).norm() == doctest::Approx(0.0));
    CHECK(apply_A(inst, Matrix::Zero(4, 4)).norm() == doctest::Approx(0.0));
    CHECK_THROWS_AS((void)apply_A(inst, Matrix::Zero(3, 3)),
                    DimensionMismatch);
  }

  TEST_CASE("apply_A matches the trace-sum oracle") {
    Rng rng(7);
    const SdpInstance inst = orthocut_instance(3, 2);
    const Matrix X = rng.symmetric_gaussian(inst.n);
    const Vector out = apply_A(inst, X);
    for (int i = 0; i < inst.m; ++i)
      CHECK(out(i) ==
            doctest::Approx(oracles::trace_inner(inst.Ai(i), X)).epsilon(1e-12));
  }

  TEST_CASE("adjoint identity and unit-vector image") {
    const SdpInstance inst = maxcut_instance(5);
    const Matrix E2 = apply_A_adjoint(inst, Vector::Unit(5, 2));
    CHECK(E2(2, 2) == doctest::Approx(1.0));
    CHECK(E2.norm() == doctest::Approx(1.0));
    CHECK(apply_A_adjoint(inst, Vector::Zero(5)).norm() == doctest::Approx(0.0));
    CHECK_THROWS_AS((void)apply_A_adjoint(inst, Vector::Ones(4)),
                    DimensionMismatch);

    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
      const Matrix X = rng.symmetric_gaussian(inst.n);
      const Vector g = rng.gaussian_matrix(inst.m, 1);
      const double lhs = apply_A(inst, X).dot(g);
      const double rhs = oracles::trace_inner(X, apply_A_adjoint(inst, g));
      CHECK(std::abs(lhs - rhs) <= 1e-12 * X.norm() * g.norm());
    }
  }

  TEST_CASE("composition equals the Gram matrix of the constraints") {
    const SdpInstance inst = orthocut_instance(2, 2);
    Matrix gram(inst.m, inst.m);
    for (int i = 0; i < inst.m; ++i)
      for (int j = 0; j < inst.m; ++j)
        gram(i, j) = oracles::trace_inner(inst.Ai(i), inst.Ai(j));
    Rng rng(3);
    const Vector g = rng.gaussian_matrix(inst.m, 1);
    const Vector composed = apply_A(inst, apply_A_adjoint(inst, g));
    CHECK((composed - gram * g).norm() <= 1e-12 * g.norm());
  }

  TEST_CASE("objective basics and fixture gap") {
    CHECK(objective(Matrix::Identity(3, 3), Matrix::Identity(3, 3)) ==
          doctest::Approx(3.0));
    Rng rng(1);
    CHECK(objective(rng.symmetric_gaussian(4), Matrix::Zero(4, 4)) ==
          doctest::Approx(0.0));

    const AppendixCFixture fx = appendix_c_fixture();
    const double at_V =
        objective(fx.C.C.mat, fx.point.V * fx.point.V.transpose());
    const double at_X0 = objective(fx.C.C.mat, fx.truth.X0.mat);
    CHECK(at_V - at_X0 > 0.0);
  }

  TEST_CASE("feasibility verdicts") {
    const SdpInstance inst = maxcut_instance(5);
    CHECK(check_feasible(inst, Matrix::Identity(5, 5), 1e-10).feasible);
    const FeasibilityReport bad =
        check_feasible(inst, 2.0 * Matrix::Identity(5, 5), 1e-10);
    CHECK(!bad.feasible);
    CHECK(bad.constraint_residual == doctest::Approx(1.0));
    // Unit diagonal but indefinite: PSD condition must reject it.
    Matrix indefinite = Matrix::Identity(5, 5);
    indefinite(0, 1) = indefinite(1, 0) = 2.0;
    CHECK(!check_feasible(inst, indefinite, 1e-10).feasible);
  }

  TEST_CASE("constraint jacobian rows and finite-difference agreement") {
    const SdpInstance inst = maxcut_instance(5);
    const BadPair pair = maxcut_bad_pair(5, 2);
    const Matrix& V = pair.point.V;
    const Matrix J = constraint_jacobian(inst, V);
    REQUIRE(J.rows() == inst.m);
    REQUIRE(J.cols() == inst.n * 2);
    for (int i = 0; i < inst.m; ++i)
      CHECK((J.row(i).transpose() - vec(2.0 * inst.Ai(i) * V)).norm() <=
            1e-14);

    Rng rng(5);
    const Matrix D = rng.gaussian_matrix(inst.n, 2);
    const Vector fd = oracles::fd_constraint_derivative(inst, V, D);
    CHECK((J * vec(D) - fd).norm() <= 1e-9 * std::max(1.0, fd.norm()));
  }

  TEST_CASE("regularity on the unit-diagonal family") {
    const SdpInstance inst = maxcut_instance(6);
    const BadPair pair = maxcut_bad_pair(6, 2);
    const RegularityReport good = check_p_regular(inst, pair.point.V);
    CHECK(good.is_regular);
    CHECK(good.jacobian_singular_values.size() == inst.m);
    CHECK(good.jacobian_singular_values.minCoeff() > good.tolerance);

    Matrix V = pair.point.V;
    V.row(3).setZero();  // that diagonal constraint direction is unreachable
    CHECK(!check_p_regular(inst, V).is_regular);
  }

  TEST_CASE("regularity everywhere on the block-orthogonality family") {
    const SdpInstance inst = orthocut_instance(4, 2);
    Rng rng(17);
    for (int trial = 0; trial < 5; ++trial) {
      Matrix V(inst.n, 3);
      for (int s = 0; s < 4; ++s)
        V.middleRows(2 * s, 2) = rng.haar_orthogonal(3).topRows(2);
      CHECK(check_p_regular(inst, V).is_regular);
    }
  }

  TEST_CASE("regularity report is orbit invariant") {
    const SdpInstance inst = maxcut_instance(9);
    const BadPair pair = maxcut_bad_pair(9, 3);
    Rng rng(23);
    const Matrix Q = rng.haar_orthogonal(3);
    const RegularityReport a = check_p_regular(inst, pair.point.V);
    const RegularityReport b = check_p_regular(inst, pair.point.V * Q);
    CHECK(a.is_regular == b.is_regular);
    CHECK((a.jacobian_singular_values - b.jacobian_singular_values)
              .cwiseAbs()
              .maxCoeff() <= 1e-10 * std::max(1.0, a.sigma_max));
  }

  TEST_CASE("factor points report feasibility honestly") {
    const SdpInstance inst = maxcut_instance(5);
    const BadPair pair = maxcut_bad_pair(5, 2);
    CHECK(pair.point.feasibility_residual <= 1e-12);
    CHECK(pair.point.numerical_rank == 2);
    Matrix off = pair.point.V;
    off(0, 0) += 0.1;
    const FactorPoint drifted = make_factor_point(inst, off);
    CHECK(drifted.feasibility_residual > 0.01);
  }

  TEST_CASE("vec and unvec are column-major inverses") {
    Matrix M(2, 2);
    M << 1, 3, 2, 4;
    const Vector v = vec(M);
    CHECK(v(0) == 1.0);
    CHECK(v(1) == 2.0);
    CHECK(v(2) == 3.0);
    CHECK(v(3) == 4.0);
    CHECK((unvec(v, 2, 2) - M).norm() == doctest::Approx(0.0));
  }

  TEST_CASE("least-norm solve picks the minimal-norm solution") {
    Matrix A(1, 2);
    A << 1.0, 1.0;
    Vector rhs(1);
    rhs << 2.0;
    const Vector x = pinv_solve(A, rhs, 1e-10);
    CHECK((A * x - rhs).norm() <= 1e-12);
    // Least-norm solution of x1 + x2 = 2 is (1, 1).
    CHECK(x(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(x(1) == doctest::Approx(1.0).epsilon(1e-12));

    Matrix sq = Matrix::Identity(3, 3) * 2.0;
    Rng rng(2);
    const Vector b = rng.gaussian_matrix(3, 1);
    CHECK((pinv_solve(sq, b, 1e-10) - b / 2.0).norm() <= 1e-12);
  }

  TEST_CASE("deterministic rng streams") {
    Rng a(42), b(42);
    for (int i = 0; i < 20; ++i) CHECK(a.gaussian() == b.gaussian());
    Rng c = Rng::derive(42, 0);
    Rng d = Rng::derive(42, 1);
    bool differ = false;
    for (int i = 0; i < 10; ++i) differ = differ || (c.gaussian() != d.gaussian());
    CHECK(differ);

    Rng e(9);
    const Matrix Q = e.haar_orthogonal(4);
    CHECK((Q.transpose() * Q - Matrix::Identity(4, 4)).norm() <= 1e-12);
  }

  TEST_CASE("tolerance profiles scale the certification thresholds") {
    const Tolerances base;
    const Tolerances strict = Tolerances::from_profile("strict");
    const Tolerances loose = Tolerances::from_profile("loose");
    CHECK(strict.psd_rel == doctest::Approx(0.1 * base.psd_rel));
    CHECK(loose.psd_rel == doctest::Approx(10.0 * base.psd_rel));
    CHECK(strict.crit_rel == doctest::Approx(0.1 * base.crit_rel));
    // Thresholds that gate numerics (not verdicts) stay fixed across profiles.
    CHECK(strict.pinv_rel == doctest::Approx(base.pinv_rel));
    CHECK(Tolerances::from_profile("bogus").psd_rel ==
          doctest::Approx(base.psd_rel));

    setenv("BMFORGE_TOL_PROFILE", "strict", 1);
    CHECK(Tolerances::from_env().psd_rel == doctest::Approx(strict.psd_rel));
    unsetenv("BMFORGE_TOL_PROFILE");
    CHECK(Tolerances::from_env().psd_rel == doctest::Approx(base.psd_rel));
  }
}
