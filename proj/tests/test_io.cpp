#include <doctest.h>

#include <sstream>

#include "radbif/curve.hpp"
#include "radbif/errors.hpp"
#include "radbif/io.hpp"

using namespace radbif;

TEST_CASE("number formatting round-trips") {
  for (double x : {0.1, 2.8103749330525267, 1e-300, -3.5, 12345678.0}) {
    CHECK(parse_double(format_double(x), "x") == x);
  }
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(parse_double(" +1.5 ", "x") == 1.5);
  CHECK_THROWS_AS(parse_double("1.5abc", "x"), Error);
  CHECK_THROWS_AS(parse_double("", "x"), Error);
  CHECK_THROWS_AS(parse_double("inf", "x"), Error);
}

TEST_CASE("curve exports") {
  const BifurcationCurve c = trace(Nonlinearity::cubic(0.05, 1, 2.5), 2, 1e-3, 2.49);
  std::ostringstream csv;
  write_curve_csv(csv, c);
  const std::string text = csv.str();
  CHECK(text.rfind("alpha,lambda,outcome\n", 0) == 0);
  CHECK(text.find(",zero\n") != std::string::npos);
  CHECK(text.find(",nan,derivative_zero\n") != std::string::npos);
  const auto j = to_json(c);
  for (const char* key : {"points", "gaps", "turning_points", "shape", "no_descent", "warnings"}) CHECK(j.contains(key));
  CHECK(j["shape"]["name"] == "disconnected(2)");
  CHECK(j["turning_points"][0]["kind"] == "min");
}

TEST_CASE("profile and mu exports") {
  const auto bvp = bvp_profile(Nonlinearity::gelfand(), 1.0, 2, {});
  REQUIRE(bvp);
  std::ostringstream csv;
  write_profile_csv(csv, bvp->profile);
  CHECK(csv.str().rfind("r,u,du\n0,1,0\n", 0) == 0);
  const auto j = to_json(bvp->profile);
  CHECK(j["columns"].size() == 3);
  CHECK(j["nodes"].size() == bvp->profile.size());

  MuPoint p;
  p.w0 = 2.0;
  p.mu = 3.0;
  std::ostringstream mu;
  write_mu_csv(mu, {p});
  CHECK(mu.str() == "w0,mu,source\n2,3,direct\n");
  CHECK_FALSE(to_json(p).contains("a"));
}

TEST_CASE("scan export") {
  const ScanTable t = scan_epsilon(Nonlinearity::perturbed_gelfand(0.2), {0.22, 0.245}, 2, {1e-3, 200.0});
  std::ostringstream csv;
  write_scan_csv(csv, t);
  CHECK(csv.str() == "epsilon,shape,n_turns\n0.22,S-shaped,2\n0.245,monotone,0\n");
}
