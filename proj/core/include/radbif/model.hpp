#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace radbif {

enum class Family {
  PerturbedGelfand,  // exp(u / (1 + eps u)); eps = 0 is the classical Gelfand e^u
  MuForm,            // exp(-1 / (eps + u))
  Limiting,          // exp(-1 / u), flat extension by 0 at u <= 0
  Cubic,             // (u - eps)(u - b)(c - u)
  PowerSum,          // u^p + u^q
  ExpShift,          // exp(-1 / (u + a))
  Constant,          // c0
};

std::string_view to_string(Family family);

/// f, f', f'' at one point.
struct Derivatives {
  double f = 0.0;
  double df = 0.0;
  double d2f = 0.0;
};

/// First and second derivatives of h = log f, where f > 0.
struct LogDerivatives {
  double dh = 0.0;
  double d2h = 0.0;
};

/// An autonomous nonlinearity f(u) with hand-derived derivatives.
///
/// Instances are immutable and cheap to copy. Evaluation is pure, so one model
/// may be shared freely between threads.
class Nonlinearity {
 public:
  static Nonlinearity perturbed_gelfand(double epsilon);
  static Nonlinearity gelfand() { return perturbed_gelfand(0.0); }
  static Nonlinearity mu_form(double epsilon);
  static Nonlinearity limiting();
  static Nonlinearity cubic(double epsilon, double b, double c);
  static Nonlinearity power_sum(double p, double q);
  static Nonlinearity exp_shift(double a);
  static Nonlinearity constant(double c0);

  Family family() const noexcept { return family_; }

  // Parameter accessors; meaningless parameters read as 0.
  double epsilon() const noexcept;
  double b() const noexcept { return family_ == Family::Cubic ? p1_ : 0.0; }
  double c() const noexcept { return family_ == Family::Cubic ? p2_ : 0.0; }
  double p() const noexcept { return family_ == Family::PowerSum ? p0_ : 0.0; }
  double q() const noexcept { return family_ == Family::PowerSum ? p1_ : 0.0; }
  double a() const noexcept { return family_ == Family::ExpShift ? p0_ : 0.0; }
  double c0() const noexcept { return family_ == Family::Constant ? p0_ : 0.0; }

  /// f (order 0), f' (order 1) or f'' (order 2). Throws Errc::InvalidOrder.
  double eval(double u, int order) const;
  double value(double u) const { return derivatives(u).f; }
  Derivatives derivatives(double u) const;

  /// h' and h'' for h = log f. Requires f(u) > 0 (Errc::NotApplicable otherwise).
  LogDerivatives log_derivatives(double u) const;

  /// True when f > 0 on the whole open half line u > 0.
  bool positive_on_half_line() const noexcept;

  /// Canonical textual form, e.g. "family=perturbed_gelfand epsilon=0.22".
  std::string describe() const;

  friend bool operator==(const Nonlinearity&, const Nonlinearity&) = default;

 private:
  Nonlinearity(Family family, double p0, double p1, double p2)
      : family_(family), p0_(p0), p1_(p1), p2_(p2) {}

  Family family_;
  double p0_;
  double p1_;
  double p2_;
};

/// f''(u) f(u) - f'(u)^2. Negative means strictly log-concave at u.
/// Throws Errc::NotApplicable where f(u) <= 0 (Cubic between its roots).
double log_concavity_margin(const Nonlinearity& model, double u);

/// Closed-form global log-concavity test for u^p + u^q: (p - q)^2 - 2(p + q) + 1 < 0.
bool power_sum_log_concave(double p, double q);

/// All u > 0 with u f'(u) = f(u), ascending.
std::vector<double> sturm_roots(const Nonlinearity& model);

/// All u > 0 where f'' changes sign, ascending (closed form for every family).
std::vector<double> inflection_points(const Nonlinearity& model);

/// The c > 2b hypothesis for the cubic family (false for other families).
bool cubic_separation_holds(const Nonlinearity& model);

/// Builds a model from `family=... epsilon=...` keys. Unknown keys are errors.
Nonlinearity model_from_keys(const std::map<std::string, std::string>& keys);

/// Parses whitespace separated `key=value` tokens; `#` starts a comment.
Nonlinearity parse_model(std::string_view text);

}  // namespace radbif
