#pragma once

#include "radbif/certificate.hpp"
#include "radbif/ivp.hpp"
#include "radbif/model.hpp"
#include "radbif/shoot.hpp"

namespace radbif {

/// The linearized solution w along a Dirichlet solution u on [0, 1].
///
/// `profile` holds (u, u', w, w') with w(0) = 1, w'(0) = 0; the integration stops
/// at the first zero of u, which sits at r = 1 up to integration error.
struct LinearizedProfile {
  VariationalProfile profile;
  double lambda = 0.0;
  double r_zero = 1.0;
  double w_at_1 = 1.0;

  /// Rescales w (not u) by c.
  LinearizedProfile scaled(double c) const;
};

LinearizedProfile solve_linearized(const Nonlinearity& model, const BvpSolution& bvp, int n,
                                   const IntegratorSettings& settings = {});

/// Thresholds shared by the certificates.
struct CertificateSettings {
  double edge = 1e-3;            // excluded neighbourhoods of 0, the test-function root and 1
  double critical = 1e-3;        // |w(1)| / |w(0)| above this is not a kernel element
  double relative_floor = 1e-8;  // integrals must exceed this fraction of their absolute mass
  double nonsingular = 1e-4;     // |w(1)| must exceed this for non-singularity
  int grid = 2000;               // sample grid on [0, 1]
};

/// min w on [0, 1 - edge]. Throws Errc::NotNearCritical away from a fold.
CertificateReport positivity_certificate(const LinearizedProfile& lin, const CertificateSettings& cs = {});

/// Radial integrals int f(u) w r^{n-1} and int f''(u) w^3 r^{n-1} with their absolute masses.
struct NondegeneracyIntegrals {
  double I1 = 0.0;
  double I2 = 0.0;
  double mass1 = 0.0;  // int |f(u) w| r^{n-1}
  double mass2 = 0.0;
};

/// Composite Gauss-Legendre over the integrator's steps, `points` nodes (8 or 16) per step.
NondegeneracyIntegrals nondegeneracy_integrals(const Nonlinearity& model, const LinearizedProfile& lin, int n,
                                               int points = 8);

/// Both integrals nonzero relative to their mass. Throws Errc::NotNearCritical away from a fold.
CertificateReport nondegeneracy(const Nonlinearity& model, const BvpSolution& bvp, const LinearizedProfile& lin,
                                int n, const CertificateSettings& cs = {});

/// Sign pattern of z = r u' + abar and L[z] = lambda (abar f'(u) - 2 f(u)) for n = 2.
///
/// The root xi of F(r) = -r u'(r) h'(u(r)) - 2 (h = log f) fixes abar = -xi u'(xi); then z and
/// L[z] must be (+, -) on (0, xi) and (-, +) on (xi, 1). When F has no root the whole interval
/// (0, 1) plays the role of (0, xi) with abar = -u'(1). Throws Errc::NotApplicable unless n = 2
/// and f is strictly log-concave and positive on (0, alpha].
CertificateReport test_function_search(const Nonlinearity& model, const BvpSolution& bvp, int n,
                                       const CertificateSettings& cs = {});

/// Non-singularity away from folds where u f' - f keeps one sign on (0, alpha].
///
/// u f' < f allows any n; u f' > f needs n = 2 and log-concave f. Otherwise
/// Errc::PreconditionFails. Passes iff |w(1)| exceeds the non-singularity threshold.
CertificateReport sturm_nonsingularity_check(const Nonlinearity& model, const BvpSolution& bvp,
                                             const LinearizedProfile& lin, int n,
                                             const CertificateSettings& cs = {});

}  // namespace radbif
