#include <doctest.h>

#include <cmath>

#include "radbif/errors.hpp"
#include "radbif/shoot.hpp"
#include "radbif/transform.hpp"

using namespace radbif;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::NonFinite;
}

}  // namespace

TEST_CASE("parameter map") {
  CHECK(mu_from_lambda(2.0, 0.5) == doctest::Approx(2.0 * 0.25 * std::exp(2.0)));
  CHECK(lambda_from_mu(mu_from_lambda(2.7, 0.22), 0.22) == doctest::Approx(2.7));
  CHECK(code_of([] { mu_from_lambda(1.0, 1e-5); }) == Errc::Overflow);
  CHECK(code_of([] { mu_from_lambda(1.0, 0.0); }) == Errc::InvalidArgument);
}

TEST_CASE("round trip between variables") {
  const double eps = 0.3;
  const auto bvp = bvp_profile(Nonlinearity::perturbed_gelfand(eps), 4.0, 2, {});
  REQUIRE(bvp);
  const ScaledSolution w = to_mu(bvp->lambda, bvp->profile, eps);
  CHECK(w.profile.at(0.0)[0] == doctest::Approx(4.0 * eps * eps));
  CHECK(mu_form_residual(w.parameter, w.profile.at(0.0)[0], eps, 2) < 1e-8);
  const ScaledSolution back = from_mu(w.parameter, w.profile, eps);
  CHECK(back.parameter == doctest::Approx(bvp->lambda));
  CHECK(back.profile.at(0.5)[0] == doctest::Approx(bvp->profile.at(0.5)[0]));
}

// Independent scipy value: limiting fold at v(0) = 1.5187379083, eta = 16.8390503117.
TEST_CASE("limiting fold") {
  const LimitingFold& f = limiting_fold();
  CHECK(f.v0 == doctest::Approx(1.5187379083103127).epsilon(1e-6));
  CHECK(f.eta0 == doctest::Approx(16.83905031168595).epsilon(1e-9));
  CHECK(&limiting_fold() == &f);
}

TEST_CASE("limiting solutions map onto mu-form solutions") {
  const double eps = 0.5;
  const auto v = bvp_profile(Nonlinearity::limiting(), 2.5, 2, {});
  REQUIRE(v);
  const MuPoint p = lemma42_map(v->lambda, v->profile, eps);
  CHECK(p.source == MuSource::Lemma42Map);
  CHECK(p.w0 == doctest::Approx(2.0));
  CHECK(v->profile.at(p.a)[0] == doctest::Approx(eps));
  const auto d = direct_mu_point(p.w0, eps, 2);
  REQUIRE(d);
  CHECK(d->mu == doctest::Approx(p.mu).epsilon(1e-8));
  CHECK(mu_form_residual(p.mu, p.w0, eps, 2) < 1e-8);
  CHECK(code_of([&] { lemma42_map(v->lambda, v->profile, 2.0); }) == Errc::PreconditionFails);
  CHECK(code_of([&] { lemma42_map(v->lambda, v->profile, 3.0); }) == Errc::PreconditionFails);
}

TEST_CASE("monotonicity check") {
  std::vector<MuPoint> pts(3);
  pts[0].w0 = 1;
  pts[0].mu = 1;
  pts[1].w0 = 3;
  pts[1].mu = 3;
  pts[2].w0 = 2;
  pts[2].mu = 2;
  CHECK(mu_monotonicity_check(pts).pass);
  pts[2].mu = 4;
  const CertificateReport bad = mu_monotonicity_check(pts);
  CHECK_FALSE(bad.pass);
  CHECK(*bad.margin("min_relative_increment") < 0.0);
}

TEST_CASE("sweep") {
  const Lemma42Sweep s = lemma42_sweep(0.5, {1.6, 2.0, 3.0, 4.0}, {}, 2);
  CHECK(s.monotonicity.pass);
  CHECK(s.max_relative_discrepancy < 1e-6);
  CHECK(s.max_residual < 1e-8);
  CHECK(code_of([] { lemma42_sweep(1e-5, {2.0}, {}, 1); }) == Errc::Overflow);
}
