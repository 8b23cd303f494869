#include <doctest.h>

#include <cmath>

#include "radbif/errors.hpp"
#include "radbif/shoot.hpp"

using namespace radbif;

// Reference values from an independent DOP853 integration (scipy, rtol 1e-13).
TEST_CASE("lambda(alpha) against an independent integrator") {
  const Nonlinearity pg = Nonlinearity::perturbed_gelfand(0.22);
  const IntegratorSettings s;
  CHECK(lambda_of_alpha(pg, 1.0, 2, s)->lambda == doctest::Approx(2.1280927507818244).epsilon(1e-8));
  CHECK(lambda_of_alpha(pg, 5.0, 2, s)->lambda == doctest::Approx(2.761659739095853).epsilon(1e-8));
  CHECK(lambda_of_alpha(pg, 20.0, 2, s)->lambda == doctest::Approx(2.674990328546096).epsilon(1e-8));
  CHECK(lambda_of_alpha(Nonlinearity::mu_form(0.5), 2.0, 2, s)->lambda ==
        doctest::Approx(13.71584292775686).epsilon(1e-8));
}

TEST_CASE("closed-form lambda") {
  for (double b : {0.25, 1.0, 4.0}) {
    const auto v = lambda_of_alpha(Nonlinearity::gelfand(), 2 * std::log(1 + b), 2, {});
    REQUIRE(v);
    CHECK(v->lambda == doctest::Approx(8 * b / ((1 + b) * (1 + b))).epsilon(1e-9));
    CHECK(v->R * v->R == doctest::Approx(v->lambda));
  }
  for (int n : {2, 3, 5, 9}) {
    CHECK(lambda_of_alpha(Nonlinearity::constant(1.0), 0.7, n, {})->lambda == doctest::Approx(2.0 * n * 0.7).epsilon(1e-12));
  }
}

TEST_CASE("stalled shots") {
  const ShotResult r = first_zero(Nonlinearity::cubic(0.05, 1, 2.5), 0.5, 2, {});
  CHECK_FALSE(r.reached_zero());
  CHECK(r.reason == StallReason::DerivativeZero);
  CHECK_FALSE(lambda_of_alpha(Nonlinearity::cubic(0.05, 1, 2.5), 0.5, 2, {}));
  const ShotResult b = first_zero(Nonlinearity::gelfand(), 800.0, 3, {});
  CHECK_FALSE(b.reached_zero());
  CHECK(b.reason == StallReason::Blowup);
  CHECK(to_string(StallReason::DerivativeZero) == "derivative_zero");
}

TEST_CASE("Dirichlet profile") {
  const auto bvp = bvp_profile(Nonlinearity::perturbed_gelfand(0.22), 3.0, 2, {});
  REQUIRE(bvp);
  CHECK(bvp->boundary_residual < 1e-8);
  CHECK(bvp->profile.r_end() == doctest::Approx(1.0));
  CHECK(bvp->profile.at(0.0)[0] == doctest::Approx(3.0));
  CHECK(std::abs(bvp->profile.at(1.0)[0]) < 1e-8);
}

TEST_CASE("sensitivity") {
  const Nonlinearity pg = Nonlinearity::perturbed_gelfand(0.22);
  const IntegratorSettings s;
  for (double a : {1.0, 5.0, 20.0}) {
    const SensitiveShot sh = sensitive_shot(pg, a, 2, s);
    REQUIRE(sh.reached_zero);
    const double h = 1e-5 * a;
    const double fd = (lambda_of_alpha(pg, a + h, 2, s)->lambda - lambda_of_alpha(pg, a - h, 2, s)->lambda) / (2 * h);
    CHECK(sh.dlambda_dalpha == doctest::Approx(fd).epsilon(1e-4).scale(1e-6));
    CHECK(sh.log_slope == doctest::Approx(a * sh.dlambda_dalpha / sh.lambda));
  }
  // lambda rises before the first fold and falls between the folds.
  CHECK(sensitive_shot(pg, 1.0, 2, s).w_at_R * sensitive_shot(pg, 5.0, 2, s).w_at_R < 0.0);
}
