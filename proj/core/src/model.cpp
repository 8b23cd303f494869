#include "radbif/model.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <sstream>

#include "radbif/errors.hpp"
#include "radbif/format.hpp"

namespace radbif {

namespace {

constexpr double kExponentLimit = 700.0;

double guarded_exp(double x) {
  if (!(x <= kExponentLimit)) {
    throw Error(Errc::NonFinite, "exponent " + format_double(x) + " exceeds the overflow guard");
  }
  return std::exp(x);
}

// Families of the form exp(-1 / (shift + u)).
double reciprocal_shift(const Nonlinearity& m) {
  switch (m.family()) {
    case Family::MuForm: return m.epsilon();
    case Family::ExpShift: return m.a();
    default: return 0.0;
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::InvalidModel, what);
}

// Roots of A u^2 + B u + C with A > 0 and non-negative discriminant, ascending, positive only.
std::vector<double> positive_quadratic_roots(double a, double b, double c) {
  const double disc = b * b - 4.0 * a * c;
  std::vector<double> roots;
  if (disc < 0.0) return roots;
  if (disc == 0.0) {
    roots.push_back(-b / (2.0 * a));
  } else {
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    roots.push_back(q / a);
    if (q != 0.0) roots.push_back(c / q);
  }
  std::erase_if(roots, [](double r) { return !(r > 0.0); });
  std::sort(roots.begin(), roots.end());
  return roots;
}

// Sign changes of phi on a geometric grid, refined by bisection.
template <class Phi>
std::vector<double> scan_roots(Phi phi, double lo, double hi, int points) {
  std::vector<double> roots;
  const double ratio = std::pow(hi / lo, 1.0 / (points - 1));
  double a = lo;
  double fa = phi(a);
  for (int i = 1; i < points; ++i) {
    const double b = (i == points - 1) ? hi : lo * std::pow(ratio, i);
    const double fb = phi(b);
    if (fa == 0.0) {
      roots.push_back(a);
    } else if (fa * fb < 0.0) {
      double x0 = a, x1 = b, f0 = fa;
      while (x1 - x0 > std::max(1e-10, 4.0 * std::numeric_limits<double>::epsilon() * x1)) {
        const double mid = 0.5 * (x0 + x1);
        const double fm = phi(mid);
        if (fm == 0.0) {
          x0 = x1 = mid;
          break;
        }
        if ((fm < 0.0) == (f0 < 0.0)) {
          x0 = mid;
          f0 = fm;
        } else {
          x1 = mid;
        }
      }
      roots.push_back(0.5 * (x0 + x1));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::PerturbedGelfand: return "perturbed_gelfand";
    case Family::MuForm: return "mu_form";
    case Family::Limiting: return "limiting";
    case Family::Cubic: return "cubic";
    case Family::PowerSum: return "power_sum";
    case Family::ExpShift: return "exp_shift";
    case Family::Constant: return "constant";
  }
  return "unknown";
}

Nonlinearity Nonlinearity::perturbed_gelfand(double epsilon) {
  require(std::isfinite(epsilon) && epsilon >= 0.0, "perturbed_gelfand needs epsilon >= 0");
  return {Family::PerturbedGelfand, epsilon, 0.0, 0.0};
}

Nonlinearity Nonlinearity::mu_form(double epsilon) {
  require(std::isfinite(epsilon) && epsilon > 0.0, "mu_form needs epsilon > 0 (use limiting for 0)");
  return {Family::MuForm, epsilon, 0.0, 0.0};
}

Nonlinearity Nonlinearity::limiting() { return {Family::Limiting, 0.0, 0.0, 0.0}; }

Nonlinearity Nonlinearity::cubic(double epsilon, double b, double c) {
  require(std::isfinite(epsilon) && std::isfinite(b) && std::isfinite(c) && 0.0 < epsilon &&
              epsilon < b && b < c,
          "cubic needs 0 < epsilon < b < c");
  return {Family::Cubic, epsilon, b, c};
}

Nonlinearity Nonlinearity::power_sum(double p, double q) {
  require(std::isfinite(p) && std::isfinite(q) && p > 0.0 && q > 0.0 && p != q,
          "power_sum needs p > 0, q > 0, p != q");
  return {Family::PowerSum, p, q, 0.0};
}

Nonlinearity Nonlinearity::exp_shift(double a) {
  require(std::isfinite(a) && a >= 0.0, "exp_shift needs a >= 0");
  return {Family::ExpShift, a, 0.0, 0.0};
}

Nonlinearity Nonlinearity::constant(double c0) {
  require(std::isfinite(c0) && c0 > 0.0, "constant needs c0 > 0");
  return {Family::Constant, c0, 0.0, 0.0};
}

double Nonlinearity::epsilon() const noexcept {
  switch (family_) {
    case Family::PerturbedGelfand:
    case Family::MuForm:
    case Family::Cubic: return p0_;
    default: return 0.0;
  }
}

double Nonlinearity::eval(double u, int order) const {
  const Derivatives d = derivatives(u);
  switch (order) {
    case 0: return d.f;
    case 1: return d.df;
    case 2: return d.d2f;
    default: throw Error(Errc::InvalidOrder, "order must be 0, 1 or 2");
  }
}

Derivatives Nonlinearity::derivatives(double u) const {
  switch (family_) {
    case Family::PerturbedGelfand: {
      const double eps = p0_;
      const double s = 1.0 + eps * u;
      if (!(s > 0.0)) throw Error(Errc::NonFinite, "1 + eps u <= 0");
      const double f = guarded_exp(u / s);
      const double dh = 1.0 / (s * s);
      const double d2h = -2.0 * eps / (s * s * s);
      return {f, f * dh, f * (dh * dh + d2h)};
    }
    case Family::MuForm:
    case Family::Limiting:
    case Family::ExpShift: {
      const double s = reciprocal_shift(*this) + u;
      if (!(s > 0.0)) return {};
      const double f = std::exp(-1.0 / s);
      if (f == 0.0) return {};
      const double s2 = s * s;
      return {f, f / s2, f * (1.0 - 2.0 * s) / (s2 * s2)};
    }
    case Family::Cubic: {
      const double a = u - p0_;
      const double b = u - p1_;
      const double c = p2_ - u;
      return {a * b * c, b * c + a * c - a * b, 2.0 * (c - a - b)};
    }
    case Family::PowerSum: {
      if (!(u > 0.0)) return {};
      const double p = p0_, q = p1_;
      const double up = std::pow(u, p), uq = std::pow(u, q);
      return {up + uq, (p * up + q * uq) / u, (p * (p - 1.0) * up + q * (q - 1.0) * uq) / (u * u)};
    }
    case Family::Constant: return {p0_, 0.0, 0.0};
  }
  return {};
}

LogDerivatives Nonlinearity::log_derivatives(double u) const {
  switch (family_) {
    case Family::PerturbedGelfand: {
      const double s = 1.0 + p0_ * u;
      if (!(s > 0.0)) throw Error(Errc::NotApplicable, "1 + eps u <= 0");
      return {1.0 / (s * s), -2.0 * p0_ / (s * s * s)};
    }
    case Family::MuForm:
    case Family::Limiting:
    case Family::ExpShift: {
      const double s = reciprocal_shift(*this) + u;
      if (!(s > 0.0)) throw Error(Errc::NotApplicable, "f vanishes at this u");
      return {1.0 / (s * s), -2.0 / (s * s * s)};
    }
    case Family::PowerSum: {
      if (!(u > 0.0)) throw Error(Errc::NotApplicable, "power_sum needs u > 0");
      const double p = p0_, q = p1_;
      const double t = std::pow(u, p - q);
      // h' = (p t + q) / (u (t + 1)); h'' from the exact margin divided by f^2.
      const double dh = (p * t + q) / (u * (t + 1.0));
      const double d2h = (-p * t - q / t + ((p - q) * (p - q) - p - q)) * t / ((t + 1.0) * (t + 1.0) * u * u);
      return {dh, d2h};
    }
    case Family::Cubic: {
      const Derivatives d = derivatives(u);
      if (!(d.f > 0.0)) throw Error(Errc::NotApplicable, "cubic f <= 0 at this u");
      const double dh = d.df / d.f;
      return {dh, d.d2f / d.f - dh * dh};
    }
    case Family::Constant: return {0.0, 0.0};
  }
  return {};
}

bool Nonlinearity::positive_on_half_line() const noexcept { return family_ != Family::Cubic; }

std::string Nonlinearity::describe() const {
  std::string out = "family=" + std::string(to_string(family_));
  auto add = [&out](const char* key, double v) { out += std::string(" ") + key + "=" + format_double(v); };
  switch (family_) {
    case Family::PerturbedGelfand:
    case Family::MuForm: add("epsilon", p0_); break;
    case Family::Limiting: break;
    case Family::Cubic:
      add("epsilon", p0_);
      add("b", p1_);
      add("c", p2_);
      break;
    case Family::PowerSum:
      add("p", p0_);
      add("q", p1_);
      break;
    case Family::ExpShift: add("a", p0_); break;
    case Family::Constant: add("c0", p0_); break;
  }
  return out;
}

double log_concavity_margin(const Nonlinearity& model, double u) {
  switch (model.family()) {
    case Family::Constant: return 0.0;
    case Family::PowerSum: {
      if (!(u > 0.0)) throw Error(Errc::NotApplicable, "power_sum needs u > 0");
      const double p = model.p(), q = model.q();
      return -p * std::pow(u, 2.0 * p - 2.0) - q * std::pow(u, 2.0 * q - 2.0) +
             std::pow(u, p + q - 2.0) * ((p - q) * (p - q) - p - q);
    }
    case Family::Cubic: {
      const Derivatives d = model.derivatives(u);
      if (!(d.f > 0.0)) throw Error(Errc::NotApplicable, "cubic f <= 0 at this u");
      return d.d2f * d.f - d.df * d.df;
    }
    default: {
      const double f = model.value(u);
      if (!(f > 0.0)) throw Error(Errc::NotApplicable, "f vanishes at this u");
      return f * f * model.log_derivatives(u).d2h;
    }
  }
}

bool power_sum_log_concave(double p, double q) {
  return (p - q) * (p - q) - 2.0 * (p + q) + 1.0 < 0.0;
}

std::vector<double> sturm_roots(const Nonlinearity& model) {
  switch (model.family()) {
    case Family::PerturbedGelfand: {
      const double eps = model.epsilon();
      if (eps == 0.0) return {1.0};
      // u / (1 + eps u)^2 = 1
      return positive_quadratic_roots(eps * eps, 2.0 * eps - 1.0, 1.0);
    }
    case Family::MuForm:
    case Family::Limiting:
    case Family::ExpShift: {
      // u / (s + u)^2 = 1
      const double s = reciprocal_shift(model);
      return positive_quadratic_roots(1.0, 2.0 * s - 1.0, s * s);
    }
    case Family::Cubic:
      return scan_roots(
          [&](double u) {
            const Derivatives d = model.derivatives(u);
            return u * d.df - d.f;
          },
          1e-6, 1e6, 6001);
    case Family::PowerSum:
      return scan_roots([&](double u) { return u * model.log_derivatives(u).dh - 1.0; }, 1e-6, 1e6, 6001);
    case Family::Constant: return {};
  }
  return {};
}

std::vector<double> inflection_points(const Nonlinearity& model) {
  switch (model.family()) {
    case Family::PerturbedGelfand: {
      const double eps = model.epsilon();
      if (eps == 0.0 || eps >= 0.5) return {};
      return {(1.0 - 2.0 * eps) / (2.0 * eps * eps)};
    }
    case Family::MuForm:
    case Family::Limiting:
    case Family::ExpShift: {
      const double s = reciprocal_shift(model);
      if (s >= 0.5) return {};
      return {0.5 - s};
    }
    case Family::Cubic: return {(model.b() + model.c() + model.epsilon()) / 3.0};
    case Family::PowerSum: {
      const double p = model.p(), q = model.q();
      const double lhs = p * (p - 1.0);
      const double rhs = -q * (q - 1.0);
      if (lhs == 0.0 || rhs == 0.0) return {};
      const double ratio = rhs / lhs;
      if (!(ratio > 0.0)) return {};
      return {std::pow(ratio, 1.0 / (p - q))};
    }
    case Family::Constant: return {};
  }
  return {};
}

bool cubic_separation_holds(const Nonlinearity& model) {
  return model.family() == Family::Cubic && model.c() > 2.0 * model.b();
}

Nonlinearity model_from_keys(const std::map<std::string, std::string>& keys) {
  auto it = keys.find("family");
  if (it == keys.end()) throw Error(Errc::InvalidArgument, "missing key 'family'");
  const std::string& family = it->second;

  std::vector<std::string> allowed;
  if (family == "perturbed_gelfand" || family == "mu_form") {
    allowed = {"epsilon"};
  } else if (family == "gelfand" || family == "limiting") {
    allowed = {};
  } else if (family == "cubic") {
    allowed = {"epsilon", "b", "c"};
  } else if (family == "power_sum") {
    allowed = {"p", "q"};
  } else if (family == "exp_shift") {
    allowed = {"a"};
  } else if (family == "constant") {
    allowed = {"c0"};
  } else {
    throw Error(Errc::InvalidArgument, "unknown family '" + family + "'");
  }
  for (const auto& [key, value] : keys) {
    if (key == "family") continue;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(Errc::InvalidArgument, "key '" + key + "' does not apply to family " + family);
    }
  }
  auto get = [&](const std::string& key) {
    auto kv = keys.find(key);
    if (kv == keys.end()) throw Error(Errc::InvalidArgument, "family " + family + " needs key '" + key + "'");
    return parse_double(kv->second, key);
  };

  if (family == "perturbed_gelfand") return Nonlinearity::perturbed_gelfand(get("epsilon"));
  if (family == "gelfand") return Nonlinearity::gelfand();
  if (family == "mu_form") return Nonlinearity::mu_form(get("epsilon"));
  if (family == "limiting") return Nonlinearity::limiting();
  if (family == "cubic") return Nonlinearity::cubic(get("epsilon"), get("b"), get("c"));
  if (family == "power_sum") return Nonlinearity::power_sum(get("p"), get("q"));
  if (family == "exp_shift") return Nonlinearity::exp_shift(get("a"));
  return Nonlinearity::constant(get("c0"));
}

Nonlinearity parse_model(std::string_view text) {
  std::map<std::string, std::string> keys;
  std::istringstream lines{std::string(text)};
  std::string line;
  while (std::getline(lines, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::string token;
    while (tokens >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw Error(Errc::InvalidArgument, "expected key=value, got '" + token + "'");
      }
      const std::string key = token.substr(0, eq);
      if (!keys.emplace(key, token.substr(eq + 1)).second) {
        throw Error(Errc::InvalidArgument, "duplicate key '" + key + "'");
      }
    }
  }
  return model_from_keys(keys);
}

}  // namespace radbif
