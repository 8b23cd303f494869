#pragma once

#include <optional>
#include <string_view>

#include "radbif/ivp.hpp"
#include "radbif/model.hpp"

namespace radbif {

/// Why a shot from height alpha failed to reach u = 0.
enum class StallReason { DerivativeZero, RangeExceeded, Blowup, RMaxReached };

std::string_view to_string(StallReason reason);

/// One lambda = 1 shot.
struct ShotResult {
  enum class Outcome { Zero, NoDescent };

  double alpha = 0.0;
  Outcome outcome = Outcome::NoDescent;
  double R = 0.0;                                   // first zero, when outcome == Zero
  StallReason reason = StallReason::RMaxReached;    // when outcome == NoDescent
  double r_stop = 0.0;                              // where the shot ended
  RadialState state_stop{};
  RadialProfile profile;

  bool reached_zero() const noexcept { return outcome == Outcome::Zero; }
};

ShotResult first_zero(const Nonlinearity& model, double alpha, int n, const IntegratorSettings& settings);

struct LambdaValue {
  double lambda = 0.0;  // R^2
  double R = 0.0;
};

/// lambda(alpha) = R^2 when the shot reaches zero at R; empty otherwise.
std::optional<LambdaValue> lambda_of_alpha(const Nonlinearity& model, double alpha, int n,
                                           const IntegratorSettings& settings);

/// A Dirichlet solution on [0, 1] obtained by rescaling a shot.
struct BvpSolution {
  double lambda = 0.0;
  RadialProfile profile;      // r in [0, 1]
  double boundary_residual;   // |u(1)| after re-integrating with the returned lambda
};

std::optional<BvpSolution> bvp_profile(const Nonlinearity& model, double alpha, int n,
                                       const IntegratorSettings& settings);

/// Shot together with the alpha-sensitivity w = du/dalpha.
///
/// At the zero, lambda'(alpha) = -2 R w(R) / u'(R), so folds of lambda(alpha) are
/// exactly the sign changes of w(R). `log_slope` is alpha lambda' / lambda.
struct SensitiveShot {
  double alpha = 0.0;
  bool reached_zero = false;
  StallReason reason = StallReason::RMaxReached;
  double lambda = 0.0;
  double R = 0.0;
  double du_at_R = 0.0;
  double w_at_R = 0.0;
  double dlambda_dalpha = 0.0;
  double log_slope = 0.0;
};

SensitiveShot sensitive_shot(const Nonlinearity& model, double alpha, int n, const IntegratorSettings& settings);

}  // namespace radbif
