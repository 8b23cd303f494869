#include "radbif/linearized.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include "radbif/errors.hpp"
#include "radbif/format.hpp"

namespace radbif {

std::string_view to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::Positivity: return "positivity";
    case CertificateKind::Nondegeneracy: return "nondegeneracy";
    case CertificateKind::TestFunction: return "test_function";
    case CertificateKind::NonSingularity: return "non_singularity";
    case CertificateKind::MuMonotonicity: return "mu_monotonicity";
  }
  return "unknown";
}

LinearizedProfile LinearizedProfile::scaled(double c) const {
  LinearizedProfile out = *this;
  out.profile = profile.scaled(c, 2);
  out.w_at_1 = w_at_1 * c;
  return out;
}

LinearizedProfile solve_linearized(const Nonlinearity& model, const BvpSolution& bvp, int n,
                                   const IntegratorSettings& settings) {
  LinearizedProfile lin;
  lin.lambda = bvp.lambda;
  lin.profile = integrate_variational(model, bvp.profile.alpha, bvp.lambda, n, settings, {EventKind::ZeroCrossing});
  if (lin.profile.events.empty()) {
    throw Error(Errc::InvalidArgument, "the solution does not vanish; not a Dirichlet solution");
  }
  lin.r_zero = lin.profile.events.back().r;
  lin.w_at_1 = lin.profile.events.back().state[2];
  return lin;
}

namespace {

double w_origin(const LinearizedProfile& lin) { return lin.profile.states().front()[2]; }

void require_critical(const LinearizedProfile& lin, const CertificateSettings& cs) {
  const double ratio = std::abs(lin.w_at_1) / std::abs(w_origin(lin));
  if (!(ratio <= cs.critical)) {
    throw Error(Errc::NotNearCritical,
                "|w(1)|/|w(0)| = " + format_double(ratio) + " exceeds " + format_double(cs.critical));
  }
}

bool strictly_log_concave_on(const Nonlinearity& model, double alpha) {
  if (model.family() == Family::Constant) return false;
  constexpr int kProbe = 400;
  for (int k = 0; k <= kProbe; ++k) {
    const double u = alpha * std::pow(1e-6, 1.0 - double(k) / kProbe);
    if (!(model.value(u) > 0.0)) return false;
    try {
      if (!(log_concavity_margin(model, u) < 0.0)) return false;
    } catch (const Error& e) {
      if (e.code() == Errc::NotApplicable) return false;
      throw;
    }
  }
  return true;
}

}  // namespace

CertificateReport positivity_certificate(const LinearizedProfile& lin, const CertificateSettings& cs) {
  require_critical(lin, cs);
  const double r_stop = (1.0 - cs.edge) * lin.r_zero;
  double min_w = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= cs.grid; ++k) {
    min_w = std::min(min_w, lin.profile.at(r_stop * double(k) / cs.grid)[2]);
  }
  const auto& radii = lin.profile.radii();
  for (std::size_t i = 0; i < radii.size() && radii[i] <= r_stop; ++i) {
    min_w = std::min(min_w, lin.profile.states()[i][2]);
  }
  CertificateReport rep;
  rep.kind = CertificateKind::Positivity;
  rep.margins = {{"min_w", min_w}, {"w_at_1", lin.w_at_1}};
  rep.pass = min_w > 0.0;
  rep.details = "min of w on [0, " + format_double(r_stop) + "]";
  return rep;
}

NondegeneracyIntegrals nondegeneracy_integrals(const Nonlinearity& model, const LinearizedProfile& lin, int n,
                                               int points) {
  if (points != 8 && points != 16) throw Error(Errc::InvalidArgument, "quadrature supports 8 or 16 points");
  const VariationalProfile& p = lin.profile;
  const double m = double(n - 1);
  NondegeneracyIntegrals out;
  auto add = [&](double a, double b, auto rule) {
    auto integral = [&](auto&& fn) { return rule(fn, a, b); };
    out.I1 += integral([&](double r) {
      const auto y = p.at(r);
      return model.value(y[0]) * y[2] * std::pow(r, m);
    });
    out.mass1 += integral([&](double r) {
      const auto y = p.at(r);
      return std::abs(model.value(y[0]) * y[2]) * std::pow(r, m);
    });
    out.I2 += integral([&](double r) {
      const auto y = p.at(r);
      return model.eval(y[0], 2) * y[2] * y[2] * y[2] * std::pow(r, m);
    });
    out.mass2 += integral([&](double r) {
      const auto y = p.at(r);
      return std::abs(model.eval(y[0], 2) * y[2] * y[2] * y[2]) * std::pow(r, m);
    });
  };
  const std::vector<double> knots = p.breakpoints();
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    if (!(knots[i + 1] > knots[i])) continue;
    if (points == 8) {
      add(knots[i], knots[i + 1],
          [](auto&& fn, double a, double b) { return boost::math::quadrature::gauss<double, 8>::integrate(fn, a, b); });
    } else {
      add(knots[i], knots[i + 1],
          [](auto&& fn, double a, double b) { return boost::math::quadrature::gauss<double, 16>::integrate(fn, a, b); });
    }
  }
  return out;
}

CertificateReport nondegeneracy(const Nonlinearity& model, const BvpSolution& bvp, const LinearizedProfile& lin,
                                int n, const CertificateSettings& cs) {
  if (std::abs(bvp.lambda - lin.lambda) > 1e-12 * bvp.lambda) {
    throw Error(Errc::InvalidArgument, "linearized profile belongs to a different solution");
  }
  require_critical(lin, cs);
  const NondegeneracyIntegrals q8 = nondegeneracy_integrals(model, lin, n, 8);
  const NondegeneracyIntegrals q16 = nondegeneracy_integrals(model, lin, n, 16);
  auto rel = [](double a, double b) { return b == 0.0 ? std::abs(a - b) : std::abs(a - b) / std::abs(b); };
  const double drift = std::max(rel(q8.I1, q16.I1), rel(q8.I2, q16.I2));

  CertificateReport rep;
  rep.kind = CertificateKind::Nondegeneracy;
  rep.margins = {{"I1", q16.I1},       {"I2", q16.I2},         {"mass1", q16.mass1},
                 {"mass2", q16.mass2}, {"quadrature_drift", drift}, {"w_at_1", lin.w_at_1}};
  const bool ok1 = std::abs(q16.I1) > cs.relative_floor * q16.mass1;
  const bool ok2 = std::abs(q16.I2) > cs.relative_floor * q16.mass2;
  rep.pass = ok1 && ok2;
  rep.details = std::string("I1 ") + (ok1 ? "nonzero" : "vanishes") + ", I2 " + (ok2 ? "nonzero" : "vanishes");
  return rep;
}

CertificateReport test_function_search(const Nonlinearity& model, const BvpSolution& bvp, int n,
                                       const CertificateSettings& cs) {
  if (n != 2) throw Error(Errc::NotApplicable, "the test-function construction needs n = 2");
  const RadialProfile& u = bvp.profile;
  if (!strictly_log_concave_on(model, u.alpha)) {
    throw Error(Errc::NotApplicable, "f is not positive and strictly log-concave on (0, alpha]");
  }
  const double lambda = bvp.lambda;
  const double r_end = u.r_end();
  const double r_hi = r_end * (1.0 - 1e-6);
  auto F = [&](double r) {
    const auto y = u.at(r);
    return -r * y[1] * model.log_derivatives(y[0]).dh - 2.0;
  };

  double xi = r_end;
  double abar = -u.at(r_end)[1];
  const double F_hi = F(r_hi);
  const bool crossing = F_hi > 0.0;
  if (crossing) {
    std::uintmax_t iters = 200;
    const double r_lo = 1e-6 * r_end;
    const auto [a, b] = boost::math::tools::toms748_solve(
        F, r_lo, r_hi, F(r_lo), F_hi, [](double x, double y) { return std::abs(y - x) <= 1e-14; }, iters);
    xi = 0.5 * (a + b);
    abar = -xi * u.at(xi)[1];
  }

  double min_z_in = std::numeric_limits<double>::infinity();
  double max_lz_in = -std::numeric_limits<double>::infinity();
  double max_z_out = -std::numeric_limits<double>::infinity();
  double min_lz_out = std::numeric_limits<double>::infinity();
  for (int k = 1; k < cs.grid; ++k) {
    const double r = r_end * double(k) / cs.grid;
    if (r < cs.edge || r > r_end - cs.edge || std::abs(r - xi) < cs.edge) continue;
    const auto y = u.at(r);
    const Derivatives d = model.derivatives(y[0]);
    const double z = r * y[1] + abar;
    const double lz = lambda * (abar * d.df - 2.0 * d.f);
    if (r < xi) {
      min_z_in = std::min(min_z_in, z);
      max_lz_in = std::max(max_lz_in, lz);
    } else {
      max_z_out = std::max(max_z_out, z);
      min_lz_out = std::min(min_lz_out, lz);
    }
  }

  CertificateReport rep;
  rep.kind = CertificateKind::TestFunction;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rep.margins = {{"xi", xi},
                 {"alpha_bar", abar},
                 {"min_z_inner", min_z_in},
                 {"max_Lz_inner", max_lz_in},
                 {"max_z_outer", crossing ? max_z_out : nan},
                 {"min_Lz_outer", crossing ? min_lz_out : nan}};
  const bool inner = min_z_in > 0.0 && max_lz_in < 0.0;
  const bool outer = !crossing || (max_z_out < 0.0 && min_lz_out > 0.0);
  rep.pass = inner && outer;
  rep.details = crossing ? "z and L[z] change sign together at xi" : "no crossing: conditions checked on (0, 1)";
  return rep;
}

CertificateReport sturm_nonsingularity_check(const Nonlinearity& model, const BvpSolution& bvp,
                                             const LinearizedProfile& lin, int n, const CertificateSettings& cs) {
  const double alpha = bvp.profile.alpha;
  for (double root : sturm_roots(model)) {
    if (root < alpha) {
      throw Error(Errc::PreconditionFails,
                  "u f' - f changes sign at u=" + format_double(root) + " below alpha=" + format_double(alpha));
    }
  }
  int sign = 0;
  constexpr int kProbe = 2000;
  for (int k = 0; k <= kProbe; ++k) {
    const double u = alpha * std::pow(1e-8, 1.0 - double(k) / kProbe);
    const Derivatives d = model.derivatives(u);
    const double v = u * d.df - d.f;
    const int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (sign != 0 && s != sign) {
      throw Error(Errc::PreconditionFails, "u f' - f changes sign near u=" + format_double(u));
    }
    sign = s;
  }
  if (sign == 0) throw Error(Errc::PreconditionFails, "u f' - f vanishes on (0, alpha]");
  if (sign > 0 && (n != 2 || !strictly_log_concave_on(model, alpha))) {
    throw Error(Errc::PreconditionFails, "u f' > f needs n = 2 and a log-concave f");
  }
  CertificateReport rep;
  rep.kind = CertificateKind::NonSingularity;
  rep.margins = {{"w_at_1", lin.w_at_1}, {"sturm_sign", double(sign)}};
  rep.pass = std::abs(lin.w_at_1) > cs.nonsingular * std::abs(w_origin(lin));
  rep.details = sign < 0 ? "u f' < f on (0, alpha]" : "u f' > f on (0, alpha], n = 2, log-concave f";
  return rep;
}

}  // namespace radbif
