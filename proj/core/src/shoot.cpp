#include "radbif/shoot.hpp"

#include <cmath>
#include <limits>

#include "radbif/errors.hpp"

namespace radbif {

std::string_view to_string(StallReason reason) {
  switch (reason) {
    case StallReason::DerivativeZero: return "derivative_zero";
    case StallReason::RangeExceeded: return "range_exceeded";
    case StallReason::Blowup: return "blowup";
    case StallReason::RMaxReached: return "r_max";
  }
  return "unknown";
}

namespace {

const EventMask kShotEvents{EventKind::ZeroCrossing, EventKind::DerivativeZero, EventKind::RangeExceeded,
                            EventKind::Blowup};

StallReason reason_of(EventKind kind) {
  switch (kind) {
    case EventKind::DerivativeZero: return StallReason::DerivativeZero;
    case EventKind::RangeExceeded: return StallReason::RangeExceeded;
    case EventKind::Blowup: return StallReason::Blowup;
    case EventKind::ZeroCrossing: break;
  }
  return StallReason::RMaxReached;
}

void require_positive(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(Errc::InvalidArgument, "alpha must be positive");
}

}  // namespace

ShotResult first_zero(const Nonlinearity& model, double alpha, int n, const IntegratorSettings& settings) {
  require_positive(alpha);
  ShotResult shot;
  shot.alpha = alpha;
  shot.profile = integrate(model, alpha, 1.0, n, settings, kShotEvents);
  const auto& prof = shot.profile;
  if (!prof.events.empty() && prof.events.back().kind == EventKind::ZeroCrossing) {
    shot.outcome = ShotResult::Outcome::Zero;
    shot.R = prof.events.back().r;
  } else {
    shot.outcome = ShotResult::Outcome::NoDescent;
    shot.reason = prof.events.empty() ? StallReason::RMaxReached : reason_of(prof.events.back().kind);
  }
  shot.r_stop = prof.r_end();
  shot.state_stop = prof.events.empty() ? prof.states().back() : prof.events.back().state;
  return shot;
}

std::optional<LambdaValue> lambda_of_alpha(const Nonlinearity& model, double alpha, int n,
                                           const IntegratorSettings& settings) {
  const ShotResult shot = first_zero(model, alpha, n, settings);
  if (!shot.reached_zero()) return std::nullopt;
  return LambdaValue{shot.R * shot.R, shot.R};
}

std::optional<BvpSolution> bvp_profile(const Nonlinearity& model, double alpha, int n,
                                       const IntegratorSettings& settings) {
  const ShotResult shot = first_zero(model, alpha, n, settings);
  if (!shot.reached_zero()) return std::nullopt;
  BvpSolution sol;
  sol.profile = shot.profile.rescaled(shot.R);
  sol.lambda = sol.profile.lambda;

  IntegratorSettings unit = settings;
  unit.r_max = 1.0;
  unit.h_init = std::min(settings.h_init, 0.5);
  unit.h_min = std::min(settings.h_min, 0.5 * unit.h_init);
  const RadialProfile check = integrate(model, alpha, sol.lambda, n, unit, EventMask{});
  sol.boundary_residual = std::abs(check.states().back()[0]);
  return sol;
}

SensitiveShot sensitive_shot(const Nonlinearity& model, double alpha, int n, const IntegratorSettings& settings) {
  require_positive(alpha);
  SensitiveShot out;
  out.alpha = alpha;
  const VariationalProfile prof = integrate_variational(model, alpha, 1.0, n, settings, kShotEvents);
  if (prof.events.empty() || prof.events.back().kind != EventKind::ZeroCrossing) {
    out.reason = prof.events.empty() ? StallReason::RMaxReached : reason_of(prof.events.back().kind);
    out.lambda = out.R = out.du_at_R = out.w_at_R = out.dlambda_dalpha = out.log_slope =
        std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const auto& ev = prof.events.back();
  out.reached_zero = true;
  out.R = ev.r;
  out.lambda = ev.r * ev.r;
  out.du_at_R = ev.state[1];
  out.w_at_R = ev.state[2];
  out.dlambda_dalpha = -2.0 * out.R * out.w_at_R / out.du_at_R;
  out.log_slope = alpha * out.dlambda_dalpha / out.lambda;
  return out;
}

}  // namespace radbif
