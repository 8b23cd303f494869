#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "radbif/certificate.hpp"
#include "radbif/ivp.hpp"
#include "radbif/model.hpp"
#include "radbif/shoot.hpp"

namespace radbif {

/// One sample of lambda(alpha). NoDescent samples carry lambda = NaN.
struct CurvePoint {
  double alpha = 0.0;
  double lambda = 0.0;
  bool reached_zero = false;
  StallReason reason = StallReason::RMaxReached;
  double log_slope = 0.0;  // alpha lambda' / lambda
  double w_at_R = 0.0;     // fold indicator: changes sign exactly at folds
};

/// Maximal alpha-interval without a positive solution; edges resolved to TraceOptions::gap_resolution.
struct Gap {
  double lo = 0.0;
  double hi = 0.0;
  StallReason reason = StallReason::RMaxReached;
};

enum class TurnKind { Max, Min };

std::string_view to_string(TurnKind kind);

struct TurningPoint {
  double alpha_star = 0.0;
  double lambda_star = 0.0;
  TurnKind kind = TurnKind::Max;
  double w_at_1 = 0.0;          // linearized boundary value at the fold
  double cross_check = 0.0;     // |alpha(golden section on lambda) - alpha(root of w(1))|
  std::vector<CertificateReport> certificates;
};

enum class ShapeKind { Monotone, SShaped, MultiTurn, Disconnected };

struct SegmentShape {
  double alpha_lo = 0.0;
  double alpha_hi = 0.0;
  ShapeKind kind = ShapeKind::Monotone;
  std::vector<TurnKind> turns;
};

struct CurveShape {
  ShapeKind kind = ShapeKind::Monotone;
  int turning_points = 0;
  std::vector<SegmentShape> segments;
};

/// "monotone", "S-shaped", "multi-turn(k)" or "disconnected(k)".
std::string to_string(const CurveShape& shape);
std::string to_string(const SegmentShape& shape);

struct TraceOptions {
  std::size_t initial_points = 200;
  std::size_t max_points = 1500;
  double slope_budget = 0.25;        // insert midpoints while |log-slope jump| exceeds this
  double gap_resolution = 1e-6;
  double fold_tolerance = 1e-8;
  double prominence = 1e-7;          // relative lambda-prominence below which fold pairs are dropped
  bool probe_hidden_folds = true;
  unsigned jobs = 1;
  IntegratorSettings integrator;
};

struct BifurcationCurve {
  Nonlinearity model = Nonlinearity::constant(1.0);
  int n = 2;
  double alpha_lo = 0.0;
  double alpha_hi = 0.0;
  std::vector<CurvePoint> samples;  // strictly increasing alpha, both outcomes
  std::vector<Gap> gaps;
  std::vector<TurningPoint> turning_points;
  CurveShape shape;
  std::vector<std::string> warnings;

  /// Samples that reached zero.
  std::vector<CurvePoint> points() const;
};

/// Samples lambda(alpha) on [alpha_lo, alpha_hi] and locates its folds. Throws Errc::EmptyCurve.
BifurcationCurve trace(const Nonlinearity& model, int n, double alpha_lo, double alpha_hi,
                       const TraceOptions& options = {});

/// Refines every sign change of the discrete slope into a fold.
std::vector<TurningPoint> refine_turning_points(const BifurcationCurve& curve, const TraceOptions& options = {});

CurveShape classify(const BifurcationCurve& curve);

struct OrderedSolutions {
  struct Solution {
    double alpha;
    double lambda;
    RadialProfile profile;  // on [0, 1]
  };
  std::vector<Solution> solutions;  // ascending alpha
  bool strictly_ordered = true;
  double min_separation = 0.0;      // min over pairs and grid nodes of u_upper - u_lower
};

/// All alpha with lambda(alpha) = lambda_query on the traced curve, with a pointwise ordering check.
OrderedSolutions solutions_at(const BifurcationCurve& curve, double lambda_query, const TraceOptions& options = {});

/// Same family with a different epsilon (PerturbedGelfand, MuForm, Cubic).
Nonlinearity with_epsilon(const Nonlinearity& family, double epsilon);

/// Alpha range used by epsilon scans: [1e-3, max(200, 4 / eps^2)].
std::pair<double, double> default_alpha_range(double epsilon);

struct ScanRow {
  double epsilon = 0.0;
  CurveShape shape;
  std::vector<TurningPoint> turning_points;
};

struct ScanTable {
  std::vector<ScanRow> rows;
  std::vector<std::string> warnings;
};

/// Traces one curve per epsilon. An empty alpha range selects default_alpha_range per row.
ScanTable scan_epsilon(const Nonlinearity& family, const std::vector<double>& epsilons, int n,
                       std::pair<double, double> alpha_range = {0.0, 0.0}, const TraceOptions& options = {});

struct Epsilon0 {
  double epsilon0 = 0.0;
  double lo = 0.0;  // folded end of the final bracket
  double hi = 0.0;
  int bisections = 0;
};

/// Bisection on epsilon between a folded and a monotone classification, down to `tolerance`.
Epsilon0 find_epsilon0(const Nonlinearity& family, double eps_a, double eps_b, int n, double tolerance = 1e-3,
                       const TraceOptions& options = {});

/// Runs fn(i) for i in [0, count) on up to `jobs` threads. Rethrows the first failure by index.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace radbif
