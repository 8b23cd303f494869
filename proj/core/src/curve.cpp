#include "radbif/curve.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include <boost/math/tools/roots.hpp>

#include "radbif/errors.hpp"
#include "radbif/format.hpp"

namespace radbif {

std::string_view to_string(TurnKind kind) { return kind == TurnKind::Max ? "max" : "min"; }

namespace {

std::string shape_name(ShapeKind kind, int turns) {
  switch (kind) {
    case ShapeKind::Monotone: return "monotone";
    case ShapeKind::SShaped: return "S-shaped";
    case ShapeKind::MultiTurn: return "multi-turn(" + std::to_string(turns) + ")";
    case ShapeKind::Disconnected: break;
  }
  return "disconnected";
}

}  // namespace

std::string to_string(const SegmentShape& shape) { return shape_name(shape.kind, int(shape.turns.size())); }

std::string to_string(const CurveShape& shape) {
  if (shape.kind == ShapeKind::Disconnected) return "disconnected(" + std::to_string(shape.segments.size()) + ")";
  return shape_name(shape.kind, shape.turning_points);
}

std::vector<CurvePoint> BifurcationCurve::points() const {
  std::vector<CurvePoint> out;
  std::copy_if(samples.begin(), samples.end(), std::back_inserter(out),
               [](const CurvePoint& p) { return p.reached_zero; });
  return out;
}

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  if (jobs == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(jobs, count);
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

constexpr double kGolden = 0.6180339887498949;

CurvePoint sample(const Nonlinearity& model, int n, double alpha, const IntegratorSettings& settings) {
  const SensitiveShot s = sensitive_shot(model, alpha, n, settings);
  CurvePoint p;
  p.alpha = alpha;
  p.reached_zero = s.reached_zero;
  p.reason = s.reason;
  p.lambda = s.lambda;
  p.log_slope = s.log_slope;
  p.w_at_R = s.w_at_R;
  return p;
}

std::vector<CurvePoint> sample_many(const Nonlinearity& model, int n, const std::vector<double>& alphas,
                                    const TraceOptions& opt) {
  std::vector<CurvePoint> out(alphas.size());
  parallel_for(alphas.size(), opt.jobs, [&](std::size_t i) { out[i] = sample(model, n, alphas[i], opt.integrator); });
  return out;
}

void merge(std::vector<CurvePoint>& samples, const std::vector<CurvePoint>& extra) {
  samples.insert(samples.end(), extra.begin(), extra.end());
  std::sort(samples.begin(), samples.end(), [](const CurvePoint& a, const CurvePoint& b) { return a.alpha < b.alpha; });
  samples.erase(std::unique(samples.begin(), samples.end(),
                            [](const CurvePoint& a, const CurvePoint& b) { return a.alpha == b.alpha; }),
                samples.end());
}

bool positive(const CurvePoint& p) { return p.w_at_R > 0.0; }

// Golden-section search for an extremum of fn on [a, b]. `stop` may end the search early.
template <class Fn, class Stop>
double golden_section(Fn fn, double a, double b, double tol, bool maximize, Stop stop) {
  const double s = maximize ? -1.0 : 1.0;
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = s * fn(c);
  double fd = s * fn(d);
  while (b - a > tol && !stop()) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = s * fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = s * fn(d);
    }
  }
  return 0.5 * (a + b);
}

void resolve_gap_edges(const Nonlinearity& model, int n, std::vector<CurvePoint>& samples, const TraceOptions& opt) {
  std::vector<std::pair<CurvePoint, CurvePoint>> edges;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    if (samples[i].reached_zero != samples[i + 1].reached_zero &&
        samples[i + 1].alpha - samples[i].alpha > opt.gap_resolution) {
      edges.emplace_back(samples[i], samples[i + 1]);
    }
  }
  std::vector<std::vector<CurvePoint>> found(edges.size());
  TraceOptions inner = opt;
  parallel_for(edges.size(), opt.jobs, [&](std::size_t k) {
    CurvePoint left = edges[k].first;
    CurvePoint right = edges[k].second;
    while (right.alpha - left.alpha > opt.gap_resolution) {
      const CurvePoint mid = sample(model, n, 0.5 * (left.alpha + right.alpha), inner.integrator);
      found[k].push_back(mid);
      (mid.reached_zero == left.reached_zero ? left : right) = mid;
    }
  });
  for (const auto& f : found) merge(samples, f);
}

void refine_slopes(const Nonlinearity& model, int n, std::vector<CurvePoint>& samples, const TraceOptions& opt) {
  while (samples.size() < opt.max_points) {
    std::vector<std::pair<double, double>> wanted;  // (jump, alpha)
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
      const CurvePoint& a = samples[i];
      const CurvePoint& b = samples[i + 1];
      if (!a.reached_zero || !b.reached_zero) continue;
      const double jump = std::abs(a.log_slope - b.log_slope);
      if (jump > opt.slope_budget && b.alpha - a.alpha > 1e-9 * b.alpha) {
        wanted.emplace_back(jump, std::sqrt(a.alpha * b.alpha));
      }
    }
    if (wanted.empty()) return;
    std::stable_sort(wanted.begin(), wanted.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    wanted.resize(std::min(wanted.size(), opt.max_points - samples.size()));
    std::vector<double> alphas;
    for (const auto& w : wanted) alphas.push_back(w.second);
    std::sort(alphas.begin(), alphas.end());
    merge(samples, sample_many(model, n, alphas, opt));
  }
}

// Looks for fold pairs hiding between samples: a shallow local extremum of the log-slope
// whose sign matches its neighbours is searched for an opposite-signed value.
void probe_hidden_folds(const Nonlinearity& model, int n, std::vector<CurvePoint>& samples, const TraceOptions& opt) {
  struct Site {
    double score;
    std::size_t index;
  };
  std::vector<Site> sites;
  const std::size_t window = 8;
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
    const CurvePoint& l = samples[i - 1];
    const CurvePoint& c = samples[i];
    const CurvePoint& r = samples[i + 1];
    if (!l.reached_zero || !c.reached_zero || !r.reached_zero) continue;
    if (positive(l) != positive(c) || positive(c) != positive(r)) continue;
    const bool valley = c.log_slope > 0 && c.log_slope <= l.log_slope && c.log_slope <= r.log_slope;
    const bool ridge = c.log_slope < 0 && c.log_slope >= l.log_slope && c.log_slope >= r.log_slope;
    if (!valley && !ridge) continue;
    double scale = 0.0;
    for (std::size_t j = i > window ? i - window : 0; j <= std::min(samples.size() - 1, i + window); ++j) {
      if (samples[j].reached_zero) scale = std::max(scale, std::abs(samples[j].log_slope));
    }
    const double score = std::abs(c.log_slope) / scale;
    if (score < 0.2) sites.push_back({score, i});
  }
  std::stable_sort(sites.begin(), sites.end(), [](const Site& a, const Site& b) { return a.score < b.score; });
  if (sites.size() > 64) sites.resize(64);

  std::vector<std::vector<CurvePoint>> found(sites.size());
  parallel_for(sites.size(), opt.jobs, [&](std::size_t k) {
    const std::size_t i = sites[k].index;
    const bool valley = samples[i].log_slope > 0;
    bool flipped = false;
    auto fn = [&](double a) {
      const CurvePoint p = sample(model, n, a, opt.integrator);
      found[k].push_back(p);
      if (!p.reached_zero) {
        flipped = true;
        return 0.0;
      }
      if (positive(p) != positive(samples[i])) flipped = true;
      return p.log_slope;
    };
    golden_section(fn, samples[i - 1].alpha, samples[i + 1].alpha, 1e-7 * samples[i].alpha, !valley,
                   [&] { return flipped; });
  });
  for (const auto& f : found) merge(samples, f);
}

std::vector<Gap> collect_gaps(const std::vector<CurvePoint>& samples) {
  std::vector<Gap> gaps;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].reached_zero) continue;
    std::size_t j = i;
    while (j + 1 < samples.size() && !samples[j + 1].reached_zero) ++j;
    gaps.push_back({samples[i].alpha, samples[j].alpha, samples[i].reason});
    i = j;
  }
  return gaps;
}

TurningPoint refine_one(const Nonlinearity& model, int n, const CurvePoint& a, const CurvePoint& b,
                        const TraceOptions& opt) {
  const IntegratorSettings& s = opt.integrator;
  auto w_of = [&](double alpha) {
    const CurvePoint p = sample(model, n, alpha, s);
    if (!p.reached_zero) {
      throw Error(Errc::BracketLost, "no solution at alpha=" + format_double(alpha) + " inside a fold bracket");
    }
    return p.w_at_R;
  };
  std::uintmax_t iters = 200;
  const double root_tol = 1e-12 * std::max(1.0, b.alpha);
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      w_of, a.alpha, b.alpha, a.w_at_R, b.w_at_R, [root_tol](double x, double y) { return std::abs(y - x) <= root_tol; },
      iters);
  const double alpha_root = 0.5 * (lo + hi);

  const bool is_max = positive(a);
  auto lambda_of = [&](double alpha) {
    const auto v = lambda_of_alpha(model, alpha, n, s);
    if (!v) throw Error(Errc::BracketLost, "no solution at alpha=" + format_double(alpha) + " inside a fold bracket");
    return v->lambda;
  };
  const double alpha_gs = golden_section(lambda_of, a.alpha, b.alpha, opt.fold_tolerance, is_max, [] { return false; });
  const double edge = 2.0 * opt.fold_tolerance;
  if (alpha_gs - a.alpha < edge || b.alpha - alpha_gs < edge) {
    throw Error(Errc::BracketLost, "fold refinement reached the bracket edge near alpha=" + format_double(alpha_gs));
  }

  const CurvePoint at = sample(model, n, alpha_root, s);
  TurningPoint tp;
  tp.alpha_star = alpha_root;
  tp.lambda_star = at.reached_zero ? at.lambda : lambda_of(alpha_root);
  tp.kind = is_max ? TurnKind::Max : TurnKind::Min;
  tp.w_at_1 = at.w_at_R;
  tp.cross_check = std::abs(alpha_gs - alpha_root);
  return tp;
}

void drop_insignificant_pairs(std::vector<TurningPoint>& folds, double prominence) {
  for (;;) {
    std::size_t best = folds.size();
    double best_ratio = prominence;
    for (std::size_t i = 0; i + 1 < folds.size(); ++i) {
      const double scale = std::max(std::abs(folds[i].lambda_star), std::abs(folds[i + 1].lambda_star));
      const double ratio = std::abs(folds[i].lambda_star - folds[i + 1].lambda_star) / scale;
      if (ratio < best_ratio) {
        best_ratio = ratio;
        best = i;
      }
    }
    if (best == folds.size()) return;
    folds.erase(folds.begin() + std::ptrdiff_t(best), folds.begin() + std::ptrdiff_t(best) + 2);
  }
}

struct Run {
  std::size_t first;
  std::size_t last;
};

std::vector<Run> zero_runs(const std::vector<CurvePoint>& samples) {
  std::vector<Run> runs;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!samples[i].reached_zero) continue;
    std::size_t j = i;
    while (j + 1 < samples.size() && samples[j + 1].reached_zero) ++j;
    runs.push_back({i, j});
    i = j;
  }
  return runs;
}

ShapeKind kind_of(const std::vector<TurnKind>& turns) {
  if (turns.empty()) return ShapeKind::Monotone;
  if (turns.size() == 2 && turns[0] == TurnKind::Max && turns[1] == TurnKind::Min) return ShapeKind::SShaped;
  return ShapeKind::MultiTurn;
}

void check_trace_arguments(int n, double lo, double hi, const TraceOptions& opt) {
  if (n < 2) throw Error(Errc::InvalidArgument, "dimension n must be >= 2");
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) {
    throw Error(Errc::InvalidArgument, "alpha range must satisfy 0 < lo < hi");
  }
  if (opt.initial_points < 3) throw Error(Errc::InvalidArgument, "initial grid needs at least 3 points");
  if (!(opt.gap_resolution > 0.0) || !(opt.fold_tolerance > 0.0) || !(opt.slope_budget > 0.0)) {
    throw Error(Errc::InvalidArgument, "trace tolerances must be positive");
  }
  opt.integrator.validate();
}

}  // namespace

std::vector<TurningPoint> refine_turning_points(const BifurcationCurve& curve, const TraceOptions& options) {
  const auto& s = curve.samples;
  std::vector<std::size_t> brackets;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (s[i].reached_zero && s[i + 1].reached_zero && positive(s[i]) != positive(s[i + 1])) brackets.push_back(i);
  }
  std::vector<TurningPoint> folds(brackets.size());
  parallel_for(brackets.size(), options.jobs, [&](std::size_t k) {
    folds[k] = refine_one(curve.model, curve.n, s[brackets[k]], s[brackets[k] + 1], options);
  });
  drop_insignificant_pairs(folds, options.prominence);
  return folds;
}

CurveShape classify(const BifurcationCurve& curve) {
  CurveShape shape;
  for (const Run& run : zero_runs(curve.samples)) {
    SegmentShape seg;
    seg.alpha_lo = curve.samples[run.first].alpha;
    seg.alpha_hi = curve.samples[run.last].alpha;
    for (const TurningPoint& tp : curve.turning_points) {
      if (tp.alpha_star >= seg.alpha_lo && tp.alpha_star <= seg.alpha_hi) seg.turns.push_back(tp.kind);
    }
    seg.kind = kind_of(seg.turns);
    shape.turning_points += int(seg.turns.size());
    shape.segments.push_back(std::move(seg));
  }
  if (shape.segments.size() > 1) {
    shape.kind = ShapeKind::Disconnected;
  } else if (!shape.segments.empty()) {
    shape.kind = shape.segments.front().kind;
  }
  return shape;
}

BifurcationCurve trace(const Nonlinearity& model, int n, double alpha_lo, double alpha_hi,
                       const TraceOptions& options) {
  check_trace_arguments(n, alpha_lo, alpha_hi, options);
  BifurcationCurve curve;
  curve.model = model;
  curve.n = n;
  curve.alpha_lo = alpha_lo;
  curve.alpha_hi = alpha_hi;

  std::vector<double> grid(options.initial_points);
  const double ratio = std::log(alpha_hi / alpha_lo);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = alpha_lo * std::exp(ratio * double(i) / double(grid.size() - 1));
  }
  grid.front() = alpha_lo;
  grid.back() = alpha_hi;
  curve.samples = sample_many(model, n, grid, options);

  resolve_gap_edges(model, n, curve.samples, options);
  refine_slopes(model, n, curve.samples, options);
  if (options.probe_hidden_folds) probe_hidden_folds(model, n, curve.samples, options);

  if (std::none_of(curve.samples.begin(), curve.samples.end(), [](const CurvePoint& p) { return p.reached_zero; })) {
    throw Error(Errc::EmptyCurve, "no alpha in [" + format_double(alpha_lo) + ", " + format_double(alpha_hi) +
                                      "] reaches u = 0");
  }
  curve.gaps = collect_gaps(curve.samples);
  curve.turning_points = refine_turning_points(curve, options);
  for (std::size_t i = 0; i + 1 < curve.turning_points.size(); ++i) {
    if (curve.turning_points[i].kind == curve.turning_points[i + 1].kind) {
      curve.warnings.push_back("consecutive folds of the same kind near alpha=" +
                               format_double(curve.turning_points[i].alpha_star));
    }
  }
  curve.shape = classify(curve);
  return curve;
}

OrderedSolutions solutions_at(const BifurcationCurve& curve, double lambda_query, const TraceOptions& options) {
  if (!(lambda_query > 0.0)) throw Error(Errc::InvalidArgument, "lambda must be positive");
  const IntegratorSettings& s = options.integrator;
  auto g = [&](double alpha) {
    const auto v = lambda_of_alpha(curve.model, alpha, curve.n, s);
    if (!v) throw Error(Errc::BracketLost, "no solution at alpha=" + format_double(alpha));
    return v->lambda - lambda_query;
  };
  const double hit = 1e-12 * lambda_query;

  std::vector<double> roots;
  for (const Run& run : zero_runs(curve.samples)) {
    // Monotone pieces: segment ends and folds, each with a known lambda.
    std::vector<std::pair<double, double>> knots{{curve.samples[run.first].alpha, curve.samples[run.first].lambda}};
    for (const TurningPoint& tp : curve.turning_points) {
      if (tp.alpha_star > knots.front().first && tp.alpha_star < curve.samples[run.last].alpha) {
        knots.emplace_back(tp.alpha_star, tp.lambda_star);
      }
    }
    knots.emplace_back(curve.samples[run.last].alpha, curve.samples[run.last].lambda);
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
      const auto [a, la] = knots[k];
      const auto [b, lb] = knots[k + 1];
      const double ga = la - lambda_query;
      const double gb = lb - lambda_query;
      if (std::abs(ga) <= hit) {
        roots.push_back(a);
      } else if (std::abs(gb) <= hit) {
        roots.push_back(b);
      } else if ((ga < 0) != (gb < 0)) {
        std::uintmax_t iters = 200;
        const double tol = 1e-13 * std::max(1.0, b);
        const auto [lo, hi] = boost::math::tools::toms748_solve(
            g, a, b, ga, gb, [tol](double x, double y) { return std::abs(y - x) <= tol; }, iters);
        roots.push_back(0.5 * (lo + hi));
      }
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double x, double y) { return std::abs(x - y) <= 1e-7 * std::max(1.0, y); }),
              roots.end());

  OrderedSolutions out;
  for (double alpha : roots) {
    auto bvp = bvp_profile(curve.model, alpha, curve.n, s);
    if (!bvp) throw Error(Errc::BracketLost, "no solution at alpha=" + format_double(alpha));
    out.solutions.push_back({alpha, bvp->lambda, std::move(bvp->profile)});
  }
  out.min_separation = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < out.solutions.size(); ++i) {
    const RadialProfile& lower = out.solutions[i].profile;
    const RadialProfile& upper = out.solutions[i + 1].profile;
    for (int k = 0; k < 1000; ++k) {
      const double r = k / 1000.0;
      const double gap = upper.at(r)[0] - lower.at(r)[0];
      out.min_separation = std::min(out.min_separation, gap);
      if (!(gap > 0.0)) out.strictly_ordered = false;
    }
  }
  if (out.solutions.size() < 2) out.min_separation = 0.0;
  return out;
}

Nonlinearity with_epsilon(const Nonlinearity& family, double epsilon) {
  switch (family.family()) {
    case Family::PerturbedGelfand: return Nonlinearity::perturbed_gelfand(epsilon);
    case Family::MuForm: return Nonlinearity::mu_form(epsilon);
    case Family::Cubic: return Nonlinearity::cubic(epsilon, family.b(), family.c());
    default: break;
  }
  throw Error(Errc::NotApplicable, std::string(to_string(family.family())) + " has no epsilon parameter");
}

std::pair<double, double> default_alpha_range(double epsilon) {
  const double hi = epsilon > 0.0 ? std::max(200.0, 4.0 / (epsilon * epsilon)) : 200.0;
  return {1e-3, hi};
}

ScanTable scan_epsilon(const Nonlinearity& family, const std::vector<double>& epsilons, int n,
                       std::pair<double, double> alpha_range, const TraceOptions& options) {
  if (epsilons.empty()) throw Error(Errc::InvalidArgument, "epsilon list is empty");
  ScanTable table;
  table.rows.resize(epsilons.size());
  TraceOptions inner = options;
  inner.jobs = 1;
  parallel_for(epsilons.size(), options.jobs, [&](std::size_t i) {
    const double eps = epsilons[i];
    const auto range = alpha_range.second > alpha_range.first ? alpha_range : default_alpha_range(eps);
    const BifurcationCurve curve = trace(with_epsilon(family, eps), n, range.first, range.second, inner);
    table.rows[i] = {eps, curve.shape, curve.turning_points};
  });
  for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
    const ScanRow& a = table.rows[i];
    const ScanRow& b = table.rows[i + 1];
    if (b.epsilon > a.epsilon && b.turning_points.size() > a.turning_points.size()) {
      table.warnings.push_back("turning-point count rises from " + std::to_string(a.turning_points.size()) + " at eps=" +
                               format_double(a.epsilon) + " to " + std::to_string(b.turning_points.size()) +
                               " at eps=" + format_double(b.epsilon));
    }
  }
  return table;
}

Epsilon0 find_epsilon0(const Nonlinearity& family, double eps_a, double eps_b, int n, double tolerance,
                       const TraceOptions& options) {
  if (!(eps_a < eps_b)) throw Error(Errc::InvalidArgument, "epsilon bracket must satisfy a < b");
  if (!(tolerance > 0.0)) throw Error(Errc::InvalidArgument, "tolerance must be positive");
  auto folded = [&](double eps) {
    const auto range = default_alpha_range(eps);
    return !trace(with_epsilon(family, eps), n, range.first, range.second, options).turning_points.empty();
  };
  const bool fa = folded(eps_a);
  const bool fb = folded(eps_b);
  if (fa == fb) {
    throw Error(Errc::SameClassAtEnds, std::string("both ends are ") + (fa ? "folded" : "monotone"));
  }
  double folded_end = fa ? eps_a : eps_b;
  double flat_end = fa ? eps_b : eps_a;
  Epsilon0 out;
  while (std::abs(flat_end - folded_end) > tolerance) {
    const double mid = 0.5 * (folded_end + flat_end);
    (folded(mid) ? folded_end : flat_end) = mid;
    ++out.bisections;
  }
  out.lo = folded_end;
  out.hi = flat_end;
  out.epsilon0 = 0.5 * (folded_end + flat_end);
  return out;
}

}  // namespace radbif
