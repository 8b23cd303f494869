#include "radbif/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "radbif/curve.hpp"
#include "radbif/errors.hpp"
#include "radbif/format.hpp"
#include "radbif/shoot.hpp"

namespace radbif {

namespace {

constexpr double kExponentLimit = 700.0;

double exp_inverse(double epsilon) {
  if (!(epsilon > 0.0)) throw Error(Errc::InvalidArgument, "epsilon must be positive");
  if (1.0 / epsilon > kExponentLimit) {
    throw Error(Errc::Overflow, "e^{1/eps} overflows for eps=" + format_double(epsilon));
  }
  return std::exp(1.0 / epsilon);
}

}  // namespace

double mu_from_lambda(double lambda, double epsilon) { return lambda * epsilon * epsilon * exp_inverse(epsilon); }

double lambda_from_mu(double mu, double epsilon) { return mu / (epsilon * epsilon * exp_inverse(epsilon)); }

ScaledSolution to_mu(double lambda, const RadialProfile& u, double epsilon) {
  ScaledSolution out{mu_from_lambda(lambda, epsilon), u.scaled(epsilon * epsilon)};
  out.profile.lambda = out.parameter;
  return out;
}

ScaledSolution from_mu(double mu, const RadialProfile& w, double epsilon) {
  ScaledSolution out{lambda_from_mu(mu, epsilon), w.scaled(1.0 / (epsilon * epsilon))};
  out.profile.lambda = out.parameter;
  return out;
}

double mu_form_residual(double mu, double w0, double epsilon, int n, const IntegratorSettings& settings) {
  IntegratorSettings unit = settings;
  unit.r_max = 1.0;
  unit.h_init = std::min(settings.h_init, 0.5);
  unit.h_min = std::min(settings.h_min, 0.5 * unit.h_init);
  const RadialProfile w = integrate(Nonlinearity::mu_form(epsilon), w0, mu, n, unit, EventMask{});
  return std::abs(w.states().back()[0]);
}

std::string_view to_string(MuSource source) {
  return source == MuSource::DirectShot ? "direct" : "lemma42";
}

const LimitingFold& limiting_fold() {
  static const LimitingFold fold = [] {
    const BifurcationCurve curve = trace(Nonlinearity::limiting(), 2, 0.2, 10.0);
    if (curve.turning_points.size() != 1) {
      throw Error(Errc::BracketLost, "expected one fold on the limiting curve, found " +
                                         std::to_string(curve.turning_points.size()));
    }
    return LimitingFold{curve.turning_points.front().lambda_star, curve.turning_points.front().alpha_star};
  }();
  return fold;
}

MuPoint lemma42_map(double eta, const RadialProfile& v, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(Errc::InvalidArgument, "epsilon must be positive");
  const double alpha = v.alpha;
  if (!(epsilon < alpha)) {
    throw Error(Errc::PreconditionFails, "need eps < v(0): eps=" + format_double(epsilon) +
                                             ", v(0)=" + format_double(alpha));
  }
  const double v0 = limiting_fold().v0;
  if (!(epsilon < v0)) {
    throw Error(Errc::PreconditionFails,
                "need eps < v0(0)=" + format_double(v0) + ", got eps=" + format_double(epsilon));
  }
  const auto a = v.first_crossing(0, epsilon);
  if (!a) throw Error(Errc::LevelNotReached, "v never drops to eps=" + format_double(epsilon));
  MuPoint p;
  p.source = MuSource::Lemma42Map;
  p.alpha = alpha;
  p.a = *a;
  p.mu = eta * (*a) * (*a);
  p.w0 = alpha - epsilon;
  return p;
}

std::optional<MuPoint> direct_mu_point(double w0, double epsilon, int n, const IntegratorSettings& settings) {
  const auto v = lambda_of_alpha(Nonlinearity::mu_form(epsilon), w0, n, settings);
  if (!v) return std::nullopt;
  MuPoint p;
  p.source = MuSource::DirectShot;
  p.mu = v->lambda;
  p.w0 = w0;
  return p;
}

CertificateReport mu_monotonicity_check(const std::vector<MuPoint>& points) {
  std::vector<MuPoint> sorted = points;
  std::stable_sort(sorted.begin(), sorted.end(), [](const MuPoint& a, const MuPoint& b) { return a.w0 < b.w0; });
  double min_inc = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    min_inc = std::min(min_inc, (sorted[i + 1].mu - sorted[i].mu) / sorted[i].mu);
  }
  CertificateReport rep;
  rep.kind = CertificateKind::MuMonotonicity;
  rep.margins = {{"min_relative_increment", sorted.size() < 2 ? 0.0 : min_inc},
                 {"points", double(sorted.size())}};
  rep.pass = sorted.size() >= 2 && min_inc > 0.0;
  rep.details = "mu along increasing w(0)";
  return rep;
}

Lemma42Sweep lemma42_sweep(double epsilon, const std::vector<double>& alpha_grid, const IntegratorSettings& settings,
                           unsigned jobs) {
  if (alpha_grid.empty()) throw Error(Errc::InvalidArgument, "alpha grid is empty");
  exp_inverse(epsilon);
  Lemma42Sweep out;
  out.epsilon = epsilon;
  out.mapped.resize(alpha_grid.size());
  out.direct.resize(alpha_grid.size());
  std::vector<double> residual(alpha_grid.size());
  limiting_fold();
  parallel_for(alpha_grid.size(), jobs, [&](std::size_t i) {
    const auto bvp = bvp_profile(Nonlinearity::limiting(), alpha_grid[i], 2, settings);
    if (!bvp) throw Error(Errc::LevelNotReached, "no limiting solution at alpha=" + format_double(alpha_grid[i]));
    MuPoint p = lemma42_map(bvp->lambda, bvp->profile, epsilon);
    p.lambda = lambda_from_mu(p.mu, epsilon);
    residual[i] = mu_form_residual(p.mu, p.w0, epsilon, 2, settings);
    auto d = direct_mu_point(p.w0, epsilon, 2, settings);
    if (!d) throw Error(Errc::LevelNotReached, "direct mu-form shot stalls at w0=" + format_double(p.w0));
    d->lambda = lambda_from_mu(d->mu, epsilon);
    out.mapped[i] = p;
    out.direct[i] = *d;
  });
  for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
    out.max_relative_discrepancy =
        std::max(out.max_relative_discrepancy, std::abs(out.mapped[i].mu - out.direct[i].mu) / out.direct[i].mu);
    out.max_residual = std::max(out.max_residual, residual[i]);
  }
  out.monotonicity = mu_monotonicity_check(out.mapped);
  return out;
}

}  // namespace radbif
