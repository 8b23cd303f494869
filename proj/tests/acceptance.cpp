// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "radbif/cli.hpp"
#include "radbif/curve.hpp"
#include "radbif/errors.hpp"
#include "radbif/linearized.hpp"
#include "radbif/model.hpp"
#include "radbif/shoot.hpp"
#include "radbif/transform.hpp"

using namespace radbif;

namespace {

struct Outcome {
  bool pass = true;
  std::string note;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!note.empty()) note += "; ";
      note += what;
    }
  }
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::deque<BifurcationCurve> traced;  // every curve seen, reused by the fold/sign-flip property

const BifurcationCurve& keep(BifurcationCurve c) {
  traced.push_back(std::move(c));
  return traced.back();
}

Outcome liouville() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const BifurcationCurve& c = keep(trace(Nonlinearity::gelfand(), 2, 0.01, 12.0));
  for (double b : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const double alpha = 2.0 * std::log(1.0 + b);
    const double exact = 8.0 * b / ((1.0 + b) * (1.0 + b));
    const auto v = lambda_of_alpha(Nonlinearity::gelfand(), alpha, 2, {});
    o.require(v && std::abs(v->lambda - exact) <= 1e-6 * exact, "lambda mismatch at b=" + fmt(b));
  }
  o.require(c.turning_points.size() == 1, "fold count " + std::to_string(c.turning_points.size()));
  if (!c.turning_points.empty()) {
    const TurningPoint& f = c.turning_points.front();
    o.require(std::abs(f.alpha_star - 2.0 * std::log(2.0)) < 1e-5 && std::abs(f.lambda_star - 2.0) < 1e-5,
              "fold at (" + fmt(f.alpha_star) + ", " + fmt(f.lambda_star) + ")");
    o.note = "fold (" + fmt(f.alpha_star) + ", " + fmt(f.lambda_star) + ")" + (o.note.empty() ? "" : "; " + o.note);
  }
  const double dt = seconds_since(t0);
  o.require(dt < 5.0, "runtime " + fmt(dt) + " s");
  return o;
}

Outcome linear() {
  Outcome o;
  const Nonlinearity k = Nonlinearity::constant(1.0);
  for (int n : {2, 3, 5, 9}) {
    const BifurcationCurve& c = keep(trace(k, n, 1e-3, 200.0));
    double worst = 0.0;
    for (const CurvePoint& p : c.points()) worst = std::max(worst, std::abs(p.lambda - 2.0 * n * p.alpha) / (2.0 * n * p.alpha));
    o.require(worst <= 1e-9, "n=" + std::to_string(n) + " relative error " + fmt(worst));
    o.require(c.turning_points.empty(), "n=" + std::to_string(n) + " has turning points");
    const auto bvp = bvp_profile(k, 1.0, n, {});
    const NondegeneracyIntegrals g = nondegeneracy_integrals(k, solve_linearized(k, *bvp, n), n);
    o.require(g.I2 == 0.0, "I2=" + fmt(g.I2));
  }
  return o;
}

Outcome figures() {
  Outcome o;
  for (double eps : {0.22, 0.245}) {
    const auto t0 = std::chrono::steady_clock::now();
    const BifurcationCurve& c = keep(trace(Nonlinearity::perturbed_gelfand(eps), 2, 1e-3, 200.0));
    const double dt = seconds_since(t0);
    const bool want_s = eps < 0.23;
    if (want_s) {
      o.require(c.shape.kind == ShapeKind::SShaped && c.turning_points.size() == 2, "eps=0.22 gives " + to_string(c.shape));
    } else {
      o.require(c.shape.kind == ShapeKind::Monotone, "eps=0.245 gives " + to_string(c.shape));
    }
    o.require(dt < 30.0, "runtime " + fmt(dt) + " s");
  }
  return o;
}

Outcome critical_epsilon() {
  Outcome o;
  const Epsilon0 e = find_epsilon0(Nonlinearity::perturbed_gelfand(0.2), 0.22, 0.25, 2, 1e-3);
  o.require(e.epsilon0 > 0.24 && e.epsilon0 < 0.25, "epsilon0=" + fmt(e.epsilon0));
  o.require(std::abs(e.hi - e.lo) <= 1e-3, "width " + fmt(std::abs(e.hi - e.lo)));
  o.note = "epsilon0=" + fmt(e.epsilon0) + (o.note.empty() ? "" : "; " + o.note);
  return o;
}

Outcome limiting() {
  Outcome o;
  std::ostringstream out, err;
  const int code = run_cli({"limiting", "--format", "json"}, out, err);
  o.require(code == 0, "exit " + std::to_string(code) + " " + err.str());
  if (code == 0) {
    const auto j = nlohmann::json::parse(out.str());
    const double v0 = j["v0"].get<double>();
    o.require(std::abs(v0 - 1.53) <= 0.02, "v0=" + fmt(v0));
    o.note = "v0=" + fmt(v0) + " eta0=" + fmt(j["eta0"].get<double>()) + (o.note.empty() ? "" : "; " + o.note);
  }
  return o;
}

Outcome sturm() {
  Outcome o;
  const auto r = sturm_roots(Nonlinearity::perturbed_gelfand(0.25));
  o.require(r.size() == 1 && r[0] == 4.0, "roots at 0.25 are not {4}");
  o.require(sturm_roots(Nonlinearity::perturbed_gelfand(0.26)).empty(), "roots at 0.26 not empty");
  return o;
}

Outcome certificates() {
  Outcome o;
  int folds = 0;
  for (double eps : {0.05, 0.15, 0.22}) {
    const Nonlinearity m = Nonlinearity::perturbed_gelfand(eps);
    const auto range = default_alpha_range(eps);
    const BifurcationCurve& c = keep(trace(m, 2, range.first, range.second));
    o.require(!c.turning_points.empty(), "no folds at eps=" + fmt(eps));
    for (const TurningPoint& tp : c.turning_points) {
      ++folds;
      const std::string at = "eps=" + fmt(eps) + " alpha=" + fmt(tp.alpha_star);
      const auto bvp = bvp_profile(m, tp.alpha_star, 2, {});
      if (!bvp) {
        o.require(false, at + " has no solution");
        continue;
      }
      const LinearizedProfile lin = solve_linearized(m, *bvp, 2);
      try {
        o.require(positivity_certificate(lin).pass, at + " positivity");
        o.require(nondegeneracy(m, *bvp, lin, 2).pass, at + " nondegeneracy");
        o.require(test_function_search(m, *bvp, 2).pass, at + " test function");
      } catch (const Error& e) {
        o.require(false, at + " " + e.what());
      }
    }
  }
  o.note = std::to_string(folds) + " folds certified" + (o.note.empty() ? "" : "; " + o.note);
  return o;
}

Outcome lemma42() {
  Outcome o;
  const double v0 = limiting_fold().v0;
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(v0 + 0.05 + 4.0 * i / 40.0);
  for (double eps : {0.22, 0.5, 1.0}) {
    const Lemma42Sweep s = lemma42_sweep(eps, grid, {}, 1);
    o.require(s.max_relative_discrepancy < 1e-6, "eps=" + fmt(eps) + " discrepancy " + fmt(s.max_relative_discrepancy));
    o.require(s.monotonicity.pass, "eps=" + fmt(eps) + " mu not increasing");
  }
  return o;
}

Outcome ordering() {
  Outcome o;
  const BifurcationCurve c = trace(Nonlinearity::perturbed_gelfand(0.22), 2, 1e-3, 200.0);
  if (c.turning_points.size() != 2) {
    o.require(false, "curve is not S-shaped");
    return o;
  }
  const double lo = c.turning_points[1].lambda_star;
  const double hi = c.turning_points[0].lambda_star;
  for (int k = 1; k <= 5; ++k) {
    const double lambda = lo + (hi - lo) * k / 6.0;
    const OrderedSolutions s = solutions_at(c, lambda);
    o.require(s.solutions.size() == 3, "lambda=" + fmt(lambda) + " gives " + std::to_string(s.solutions.size()));
    o.require(s.strictly_ordered, "lambda=" + fmt(lambda) + " not ordered");
  }
  return o;
}

Outcome multi_turn() {
  Outcome o;
  const BifurcationCurve& c = keep(trace(Nonlinearity::gelfand(), 3, 0.1, 1000.0));
  bool above = false, below = false;
  for (const TurningPoint& tp : c.turning_points) {
    above = above || tp.lambda_star > 2.0;
    below = below || tp.lambda_star < 2.0;
  }
  o.require(c.turning_points.size() >= 4, "folds " + std::to_string(c.turning_points.size()));
  o.require(above && below, "fold values do not bracket 2");
  o.note = std::to_string(c.turning_points.size()) + " folds" + (o.note.empty() ? "" : "; " + o.note);
  return o;
}

Outcome cubic() {
  Outcome o;
  const double eps = 0.05;
  const BifurcationCurve& c = keep(trace(Nonlinearity::cubic(eps, 1.0, 2.5), 2, 1e-3, 2.49));
  o.require(c.shape.kind == ShapeKind::Disconnected && c.shape.segments.size() == 2, "shape " + to_string(c.shape));
  if (c.shape.segments.size() != 2) return o;
  const SegmentShape& lower = c.shape.segments[0];
  const SegmentShape& upper = c.shape.segments[1];
  o.require(lower.kind == ShapeKind::Monotone, "lower segment " + to_string(lower));
  o.require(upper.turns.size() == 1 && upper.turns[0] == TurnKind::Min, "upper segment " + to_string(upper));
  std::vector<CurvePoint> low;
  for (const CurvePoint& p : c.points()) {
    if (p.alpha <= lower.alpha_hi) low.push_back(p);
  }
  o.require(low.size() > 10, "too few lower samples");
  if (low.size() > 10) {
    const double top = low.back().lambda;
    bool trend = true;
    for (std::size_t i = 1; i < low.size(); ++i) {
      if (low[i].lambda < top / 10.0) continue;
      trend = trend && low[i].lambda > low[i - 1].lambda && low[i].alpha > low[i - 1].alpha && low[i].alpha < eps;
    }
    o.require(trend, "u(0) does not approach epsilon monotonically");
    o.require(eps - low.back().alpha < 1e-4, "closest approach " + fmt(eps - low.back().alpha));
  }
  return o;
}

// Sign flips of w(R) between neighbouring successful samples against the refined folds. A flip
// without a fold is accepted only where lambda varies by less than the prominence floor
// (1e-7 lambda) around it, since such turns are removed by the classification cleanup.
bool folds_match_flips(const BifurcationCurve& c, std::string& why) {
  const double floor = TraceOptions{}.prominence;
  std::size_t matched = 0;
  for (std::size_t i = 1; i < c.samples.size(); ++i) {
    const CurvePoint& a = c.samples[i - 1];
    const CurvePoint& b = c.samples[i];
    if (!a.reached_zero || !b.reached_zero) continue;
    if ((a.w_at_R < 0.0) == (b.w_at_R < 0.0)) continue;
    const auto folds = std::count_if(c.turning_points.begin(), c.turning_points.end(), [&](const TurningPoint& tp) {
      return tp.alpha_star >= a.alpha && tp.alpha_star <= b.alpha;
    });
    if (folds == 1) {
      ++matched;
      continue;
    }
    double lo = std::min(a.lambda, b.lambda), hi = std::max(a.lambda, b.lambda);
    for (std::size_t j : {i - 1 > 0 ? i - 2 : i - 1, std::min(i + 1, c.samples.size() - 1)}) {
      if (!c.samples[j].reached_zero) continue;
      lo = std::min(lo, c.samples[j].lambda);
      hi = std::max(hi, c.samples[j].lambda);
    }
    if (folds != 0 || hi - lo > floor * hi) {
      why = c.model.describe() + " n=" + std::to_string(c.n) + ": flip on [" + fmt(a.alpha) + ", " + fmt(b.alpha) +
            "] with " + std::to_string(folds) + " folds, lambda variation " + fmt((hi - lo) / hi);
      return false;
    }
  }
  if (matched != c.turning_points.size()) {
    why = c.model.describe() + " n=" + std::to_string(c.n) + ": " + std::to_string(c.turning_points.size() - matched) +
          " folds without a sign flip";
    return false;
  }
  for (const TurningPoint& tp : c.turning_points) {
    if (std::abs(tp.w_at_1) > 1e-6) {
      why = c.model.describe() + " w(1)=" + fmt(tp.w_at_1) + " at a fold";
      return false;
    }
  }
  return true;
}

Outcome properties() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();

  struct Case {
    Nonlinearity model;
    double alpha;
    int n;
  };
  const std::vector<Case> cases{
      {Nonlinearity::perturbed_gelfand(0.22), 1.0, 2},  {Nonlinearity::perturbed_gelfand(0.22), 5.0, 2},
      {Nonlinearity::perturbed_gelfand(0.22), 30.0, 2}, {Nonlinearity::perturbed_gelfand(0.05), 100.0, 2},
      {Nonlinearity::gelfand(), 0.5, 2},                {Nonlinearity::gelfand(), 3.0, 3},
      {Nonlinearity::limiting(), 2.5, 2},               {Nonlinearity::mu_form(0.5), 2.0, 2},
      {Nonlinearity::cubic(0.05, 1, 2.5), 2.42, 2},     {Nonlinearity::power_sum(1.5, 2.0), 1.0, 3}};
  for (const Case& k : cases) {
    const SensitiveShot s = sensitive_shot(k.model, k.alpha, k.n, {});
    const double h = 1e-5 * k.alpha;
    const auto up = lambda_of_alpha(k.model, k.alpha + h, k.n, {});
    const auto dn = lambda_of_alpha(k.model, k.alpha - h, k.n, {});
    if (!s.reached_zero || !up || !dn) {
      o.require(false, k.model.describe() + " shot stalls");
      continue;
    }
    const double fd = (up->lambda - dn->lambda) / (2 * h);
    const double rel = std::abs(s.dlambda_dalpha - fd) / std::max(std::abs(fd), 1e-3 * s.lambda / k.alpha);
    o.require(rel < 1e-4, k.model.describe() + " variational mismatch " + fmt(rel));
  }

  for (const BifurcationCurve& c : traced) {
    std::string why;
    o.require(folds_match_flips(c, why), why);
  }

  TraceOptions fine;
  fine.initial_points = 400;
  const BifurcationCurve coarse = trace(Nonlinearity::perturbed_gelfand(0.22), 2, 1e-3, 200.0);
  const BifurcationCurve dense = trace(Nonlinearity::perturbed_gelfand(0.22), 2, 1e-3, 200.0, fine);
  o.require(coarse.turning_points.size() == dense.turning_points.size(), "refinement changes the fold count");
  for (std::size_t i = 0; i < std::min(coarse.turning_points.size(), dense.turning_points.size()); ++i) {
    const double da = std::abs(coarse.turning_points[i].alpha_star - dense.turning_points[i].alpha_star);
    const double dl = std::abs(coarse.turning_points[i].lambda_star - dense.turning_points[i].lambda_star);
    o.require(da < 1e-6 && dl < 1e-6, "fold drift " + fmt(da) + " / " + fmt(dl));
  }

  std::string outputs[2];
  const char* jobs[2] = {"1", "4"};
  for (int i = 0; i < 2; ++i) {
    std::ostringstream out, err;
    run_cli({"scan", "--epsilons", "0.2:0.25:0.01", "--format", "json", "--jobs", jobs[i]}, out, err);
    outputs[i] = out.str();
  }
  o.require(!outputs[0].empty() && outputs[0] == outputs[1], "output depends on --jobs");

  const double dt = seconds_since(t0);
  o.require(dt < 180.0, "runtime " + fmt(dt) + " s");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"closed-form Liouville-Gelfand curve and fold", liouville},
      {"constant forcing is linear with no folds", linear},
      {"S-shaped at 0.22, monotone at 0.245", figures},
      {"critical epsilon in (0.24, 0.25)", critical_epsilon},
      {"limiting fold height 1.53 +- 0.02", limiting},
      {"Sturm roots at 0.25 and 0.26", sturm},
      {"certificates at every fold", certificates},
      {"limiting-to-mu-form map agrees and is increasing", lemma42},
      {"three ordered solutions in the S region", ordering},
      {"multi-turn Gelfand curve in three dimensions", multi_turn},
      {"cubic curve structure", cubic},
      {"property suites", properties},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.note = std::string("exception: ") + e.what();
    }
    all = all && o.pass;
    std::printf("%s %zu: %s (%.2f s)%s%s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, seconds_since(t0),
                o.note.empty() ? "" : " -- ", o.note.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
