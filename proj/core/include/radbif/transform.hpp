#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "radbif/certificate.hpp"
#include "radbif/ivp.hpp"
#include "radbif/model.hpp"

namespace radbif {

/// mu = lambda eps^2 e^{1/eps}. Throws Errc::Overflow when 1/eps > 700, InvalidArgument for eps <= 0.
double mu_from_lambda(double lambda, double epsilon);
double lambda_from_mu(double mu, double epsilon);

/// A solution pair in the other variables: (mu, w = eps^2 u) or (lambda, u = w / eps^2).
struct ScaledSolution {
  double parameter = 0.0;
  RadialProfile profile;
};

ScaledSolution to_mu(double lambda, const RadialProfile& u, double epsilon);
ScaledSolution from_mu(double mu, const RadialProfile& w, double epsilon);

/// |w(1)| after re-integrating w'' + (n-1)/r w' + mu e^{-1/(eps + w)} = 0 from w(0).
double mu_form_residual(double mu, double w0, double epsilon, int n, const IntegratorSettings& settings = {});

enum class MuSource { DirectShot, Lemma42Map };

std::string_view to_string(MuSource source);

struct MuPoint {
  double mu = 0.0;
  double w0 = 0.0;
  MuSource source = MuSource::DirectShot;
  double alpha = 0.0;  // limiting height v(0), for mapped points
  double a = 0.0;      // first radius with v = eps, for mapped points
  double lambda = 0.0; // the same solution in perturbed Gelfand variables, lambda = mu e^{-1/eps} / eps^2
};

/// The limiting fold (eta0, v0(0)), traced once per process and cached.
struct LimitingFold {
  double eta0 = 0.0;
  double v0 = 0.0;
};

const LimitingFold& limiting_fold();

/// Maps a limiting solution (eta, v on [0, 1]) to the mu-form solution w(t) = v(a t) - eps, mu = eta a^2.
///
/// Requires 0 < eps < v(0) and eps < v0(0) (Errc::PreconditionFails); Errc::LevelNotReached if v
/// never drops to eps.
MuPoint lemma42_map(double eta, const RadialProfile& v, double epsilon);

/// mu-form solution from a direct shot at height w0; empty when the shot stalls.
std::optional<MuPoint> direct_mu_point(double w0, double epsilon, int n, const IntegratorSettings& settings = {});

/// Strictly increasing mu along points sorted by w0; margin is the smallest relative increment.
CertificateReport mu_monotonicity_check(const std::vector<MuPoint>& points);

struct Lemma42Sweep {
  double epsilon = 0.0;
  std::vector<MuPoint> mapped;
  std::vector<MuPoint> direct;
  double max_relative_discrepancy = 0.0;  // mapped mu against direct mu
  double max_residual = 0.0;              // re-integration residual of mapped points
  CertificateReport monotonicity;
};

/// Maps every alpha of the grid, checks monotonicity and cross-validates against direct shots.
Lemma42Sweep lemma42_sweep(double epsilon, const std::vector<double>& alpha_grid,
                           const IntegratorSettings& settings = {}, unsigned jobs = 1);

}  // namespace radbif
