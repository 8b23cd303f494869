#include "radbif/ivp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "radbif/errors.hpp"
#include "radbif/format.hpp"

namespace radbif {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::ZeroCrossing: return "zero_crossing";
    case EventKind::DerivativeZero: return "derivative_zero";
    case EventKind::Blowup: return "blowup";
    case EventKind::RangeExceeded: return "range_exceeded";
  }
  return "unknown";
}

void IntegratorSettings::validate() const {
  const bool positive = abs_tol > 0 && rel_tol > 0 && h_init > 0 && h_min > 0 && r_max > 0 && u_max > 0 &&
                        u_margin > 0;
  if (!positive || !(h_min < h_init) || !(h_init < r_max)) {
    throw Error(Errc::InvalidArgument, "integrator settings must be positive with h_min < h_init < r_max");
  }
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr std::size_t kMaxSteps = 2'000'000;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

template <std::size_t N>
bool all_finite(const State<N>& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

template <std::size_t N, class Rhs>
bool safe_rhs(const Rhs& rhs, double r, const State<N>& y, State<N>& out) {
  try {
    out = rhs(r, y);
  } catch (const Error& e) {
    if (e.code() != Errc::NonFinite) throw;
    return false;
  }
  return all_finite(out);
}

template <std::size_t N>
struct StepOut {
  State<N> y1{};
  std::array<State<N>, 7> k{};
  State<N> err{};
};

template <std::size_t N, class Rhs>
bool dp_step(const Rhs& rhs, double r, const State<N>& y, const State<N>& k1, double h, StepOut<N>& out) {
  auto& k = out.k;
  k[0] = k1;
  State<N> t{};
  auto stage = [&](double c, auto&& combine, State<N>& dst) {
    for (std::size_t i = 0; i < N; ++i) t[i] = y[i] + h * combine(i);
    return safe_rhs<N>(rhs, r + c * h, t, dst);
  };
  if (!stage(c2, [&](std::size_t i) { return a21 * k[0][i]; }, k[1])) return false;
  if (!stage(c3, [&](std::size_t i) { return a31 * k[0][i] + a32 * k[1][i]; }, k[2])) return false;
  if (!stage(c4, [&](std::size_t i) { return a41 * k[0][i] + a42 * k[1][i] + a43 * k[2][i]; }, k[3])) return false;
  if (!stage(c5, [&](std::size_t i) { return a51 * k[0][i] + a52 * k[1][i] + a53 * k[2][i] + a54 * k[3][i]; },
             k[4]))
    return false;
  if (!stage(1.0,
             [&](std::size_t i) {
               return a61 * k[0][i] + a62 * k[1][i] + a63 * k[2][i] + a64 * k[3][i] + a65 * k[4][i];
             },
             k[5]))
    return false;
  for (std::size_t i = 0; i < N; ++i) {
    out.y1[i] = y[i] + h * (a71 * k[0][i] + a73 * k[2][i] + a74 * k[3][i] + a75 * k[4][i] + a76 * k[5][i]);
  }
  if (!all_finite(out.y1) || !safe_rhs<N>(rhs, r + h, out.y1, k[6])) return false;
  for (std::size_t i = 0; i < N; ++i) {
    out.err[i] = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] + e6 * k[5][i] + e7 * k[6][i]);
  }
  return true;
}

template <std::size_t N>
double error_norm(const State<N>& y0, const StepOut<N>& out, const IntegratorSettings& s) {
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sk = s.abs_tol + s.rel_tol * std::max(std::abs(y0[i]), std::abs(out.y1[i]));
    const double e = out.err[i] / sk;
    sum += e * e;
  }
  return std::sqrt(sum / double(N));
}

template <std::size_t N>
detail::DenseSegment<N> make_dense(double r, double h, const State<N>& y0, const StepOut<N>& out) {
  detail::DenseSegment<N> seg;
  seg.r0 = r;
  seg.h = h;
  const auto& k = out.k;
  for (std::size_t i = 0; i < N; ++i) {
    const double dy = out.y1[i] - y0[i];
    const double bspl = h * k[0][i] - dy;
    seg.c[0][i] = y0[i];
    seg.c[1][i] = dy;
    seg.c[2][i] = bspl;
    seg.c[3][i] = dy - h * k[6][i] - bspl;
    seg.c[4][i] = h * (d1 * k[0][i] + d3 * k[2][i] + d4 * k[3][i] + d5 * k[4][i] + d6 * k[5][i] + d7 * k[6][i]);
  }
  return seg;
}

template <std::size_t N>
State<N> dense_eval(const detail::DenseSegment<N>& seg, double r) {
  const double th = (r - seg.r0) / seg.h;
  const double th1 = 1.0 - th;
  State<N> y{};
  const auto& c = seg.c;
  for (std::size_t i = 0; i < N; ++i) {
    y[i] = c[0][i] + th * (c[1][i] + th1 * (c[2][i] + th * (c[3][i] + th1 * c[4][i])));
  }
  return y;
}

template <std::size_t N>
State<N> dense_slope(const detail::DenseSegment<N>& seg, double r) {
  const double th = (r - seg.r0) / seg.h;
  const double th1 = 1.0 - th;
  State<N> d{};
  const auto& c = seg.c;
  for (std::size_t i = 0; i < N; ++i) {
    const double C = c[3][i] + th1 * c[4][i];
    const double dC = -c[4][i];
    const double B = c[2][i] + th * C;
    const double dB = C + th * dC;
    const double A = c[1][i] + th1 * B;
    const double dA = -B + th1 * dB;
    d[i] = (A + th * dA) / seg.h;
  }
  return d;
}

template <std::size_t N>
State<N> head_eval(const detail::SeriesHead<N>& head, double r, bool slope) {
  State<N> y{};
  const double x = r / head.r_end;
  const double s = x * x;
  for (std::size_t j = 0; j < N / 2; ++j) {
    const auto& c = head.coeffs[j];
    const double v = c[0] + s * (c[1] + s * c[2]);
    const double dv = x * (2.0 * c[1] + 4.0 * s * c[2]) / head.r_end;
    const double d2v = (2.0 * c[1] + 12.0 * s * c[2]) / (head.r_end * head.r_end);
    y[2 * j] = slope ? dv : v;
    y[2 * j + 1] = slope ? d2v : dv;
  }
  return y;
}

// Illinois root polish of g(r) = value(r) - level on [a, b] with a strict sign change.
template <class G>
double illinois(G g, double a, double b, double ga, double gb) {
  int side = 0;
  double x = a;
  for (int it = 0; it < 200; ++it) {
    x = (ga * b - gb * a) / (ga - gb);
    if (!(x > a && x < b)) x = 0.5 * (a + b);
    const double gx = g(x);
    if (gx == 0.0) return x;
    if ((gx > 0) == (gb > 0)) {
      b = x;
      gb = gx;
      if (side == -1) ga *= 0.5;
      side = -1;
    } else {
      a = x;
      ga = gx;
      if (side == +1) gb *= 0.5;
      side = +1;
    }
    if (b - a <= 4.0 * kEps * std::max(std::abs(a), std::abs(b))) break;
  }
  return x;
}

struct EventSpec {
  EventKind kind;
  std::size_t comp;
  double level;
  int dir;  // -1: decreasing through level, +1: increasing, 0: either
  double r_min;
};

bool crosses(const EventSpec& e, double ga, double gb) {
  const bool down = ga > 0.0 && gb <= 0.0;
  const bool up = ga < 0.0 && gb >= 0.0;
  return e.dir < 0 ? down : (e.dir > 0 ? up : (down || up));
}

std::vector<EventSpec> event_specs(EventMask stop, const IntegratorSettings& s, double r_min_derivative) {
  std::vector<EventSpec> specs;
  if (stop.contains(EventKind::ZeroCrossing)) specs.push_back({EventKind::ZeroCrossing, 0, 0.0, -1, 0.0});
  if (stop.contains(EventKind::DerivativeZero)) {
    specs.push_back({EventKind::DerivativeZero, 1, 0.0, 0, r_min_derivative});
  }
  if (stop.contains(EventKind::RangeExceeded)) {
    specs.push_back({EventKind::RangeExceeded, 0, s.u_max, +1, 0.0});
    if (!stop.contains(EventKind::ZeroCrossing)) {
      specs.push_back({EventKind::RangeExceeded, 0, -s.u_margin, -1, 0.0});
    }
  }
  return specs;
}

template <std::size_t N, class Rhs>
void run(const Rhs& rhs, Profile<N>& prof, double r0, State<N> y, const IntegratorSettings& s,
         const std::vector<EventSpec>& specs, bool blowup_stops, double length_scale) {
  double r = r0;
  State<N> k1{};
  auto blowup = [&](const std::string& why) {
    if (!blowup_stops) throw Error(Errc::NonFiniteState, why + " at r=" + format_double(r));
    prof.events.push_back({EventKind::Blowup, r, y});
  };
  if (!safe_rhs<N>(rhs, r, y, k1)) {
    blowup("non-finite right-hand side");
    return;
  }
  const double r_stop = s.r_max;
  double h = std::min(std::max(r0, s.h_min), s.h_init);
  double err_old = 1e-4;
  bool rejected = false;
  StepOut<N> out;

  for (std::size_t steps = 0;; ++steps) {
    if (steps > kMaxSteps) throw Error(Errc::StepSizeUnderflow, "step budget exhausted");
    bool last = false;
    if (r + h >= r_stop) {
      h = r_stop - r;
      last = true;
    }
    const double floor = s.h_min * std::max(r, length_scale);
    const bool ok = dp_step<N>(rhs, r, y, k1, h, out);
    const double err = ok ? error_norm<N>(y, out, s) : std::numeric_limits<double>::infinity();
    if (!(err <= 1.0)) {
      h *= std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25;
      rejected = true;
      if (h < floor) {
        if (!std::isfinite(err)) {
          blowup("non-finite state");
          return;
        }
        throw Error(Errc::StepSizeUnderflow, "step size " + format_double(h) + " at r=" + format_double(r));
      }
      continue;
    }

    const detail::DenseSegment<N> seg = make_dense<N>(r, h, y, out);

    // Earliest requested event inside (r, r + h].
    const EventSpec* hit = nullptr;
    double r_hit = 0.0;
    for (const EventSpec& e : specs) {
      const double ga = y[e.comp] - e.level;
      const double gb = out.y1[e.comp] - e.level;
      if (r + h <= e.r_min || !crosses(e, ga, gb)) continue;
      const double re = illinois([&](double x) { return dense_eval<N>(seg, x)[e.comp] - e.level; }, r, r + h, ga, gb);
      if (re < e.r_min) continue;
      if (hit == nullptr || re < r_hit) {
        hit = &e;
        r_hit = re;
      }
    }

    if (hit != nullptr) {
      // Land exactly on the event with full steps from r, Newton-corrected in r.
      const double lo = r;
      const double hi = r + h;
      StepOut<N> land;
      double re = r_hit;
      bool landed = false;
      for (int it = 0; it < 6; ++it) {
        if (!(re > lo)) break;
        if (!dp_step<N>(rhs, r, y, k1, re - r, land)) break;
        landed = true;
        const double g = land.y1[hit->comp] - hit->level;
        const double gp = land.k[6][hit->comp];
        const double dr = -g / gp;
        if (!std::isfinite(dr)) break;
        const double next = std::clamp(re + dr, lo + (hi - lo) * 1e-12, hi);
        if (std::abs(next - re) <= 4.0 * kEps * re) break;
        re = next;
        landed = false;
      }
      if (!landed && re > lo) landed = dp_step<N>(rhs, r, y, k1, re - r, land);
      if (landed) {
        prof.push_segment(make_dense<N>(r, re - r, y, land));
        prof.push_node(re, land.y1);
        prof.events.push_back({hit->kind, re, land.y1});
      } else {
        const State<N> ye = dense_eval<N>(seg, r_hit);
        detail::DenseSegment<N> cut = seg;
        prof.push_segment(cut);
        prof.push_node(r_hit, ye);
        prof.events.push_back({hit->kind, r_hit, ye});
      }
      return;
    }

    prof.push_segment(seg);
    prof.push_node(r + h, out.y1);
    r += h;
    y = out.y1;
    k1 = out.k[6];
    if (last) return;

    double fac = 0.9 * std::pow(std::max(err, 1e-12), -0.17) * std::pow(err_old, 0.04);
    fac = std::clamp(fac, 0.2, 10.0);
    if (rejected) fac = std::min(fac, 1.0);
    h *= fac;
    err_old = std::max(err, 1e-4);
    rejected = false;
  }
}

void check_arguments(const Nonlinearity& model, double alpha, double lambda, int n) {
  if (n < 2) throw Error(Errc::InvalidArgument, "dimension n must be >= 2");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(Errc::InvalidArgument, "lambda must be positive");
  const bool zero_ok = model.family() == Family::Limiting;
  if (!std::isfinite(alpha) || alpha < 0.0 || (alpha == 0.0 && !zero_ok)) {
    throw Error(Errc::InvalidArgument, "alpha must be positive");
  }
}

double length_scale_at(const Derivatives& d, double lambda) {
  const double rate = lambda * (std::abs(d.f) + std::abs(d.df));
  return rate > 0.0 ? 1.0 / std::sqrt(rate) : std::numeric_limits<double>::infinity();
}

template <std::size_t N>
Profile<N> integrate_radial(const Nonlinearity& model, double alpha, double lambda, int n,
                            const IntegratorSettings& s, EventMask stop) {
  s.validate();
  check_arguments(model, alpha, lambda, n);

  Profile<N> prof;
  prof.n = n;
  prof.alpha = alpha;
  prof.lambda = lambda;

  State<N> y0{};
  y0[0] = alpha;
  if constexpr (N == 4) y0[2] = 1.0;
  prof.push_node(0.0, y0);

  Derivatives d0;
  try {
    d0 = model.derivatives(alpha);
  } catch (const Error& e) {
    if (e.code() != Errc::NonFinite) throw;
    if (!stop.contains(EventKind::Blowup)) throw Error(Errc::NonFiniteState, e.what());
    prof.events.push_back({EventKind::Blowup, 0.0, y0});
    return prof;
  }

  const double scale = length_scale_at(d0, lambda);
  const double h0 = std::min(s.h_init, 1e-3 * scale);
  const double nn = double(n);
  // Coefficients of s = (r / h0)^2, formed from lambda * f * h0^2 so that nothing overflows.
  const double hh = h0 * h0;
  const double pf = lambda * d0.f * hh;
  const double pdf = lambda * d0.df * hh;
  const double a2 = -pf / (2.0 * nn);
  const double a4 = pf * pdf / (8.0 * nn * (nn + 2.0));

  detail::SeriesHead<N> head;
  head.r_end = h0;
  head.coeffs[0] = {alpha, a2, a4};
  if constexpr (N == 4) {
    const double b2 = -pdf / (2.0 * nn);
    const double b4 = -(lambda * d0.d2f * hh * a2 + pdf * b2) / (4.0 * (nn + 2.0));
    head.coeffs[1] = {1.0, b2, b4};
  }
  prof.set_head(head);
  const State<N> y_start = head_eval<N>(head, h0, false);
  prof.push_node(h0, y_start);

  const double m = nn - 1.0;
  const auto specs = event_specs(stop, s, 10.0 * h0);
  const bool blowup_stops = stop.contains(EventKind::Blowup);
  const double floor_scale = std::min(1.0, scale);
  if constexpr (N == 2) {
    auto rhs = [&](double r, const State<2>& y) -> State<2> {
      const Derivatives d = model.derivatives(y[0]);
      return {y[1], -m / r * y[1] - lambda * d.f};
    };
    run<2>(rhs, prof, h0, y_start, s, specs, blowup_stops, floor_scale);
  } else {
    auto rhs = [&](double r, const State<4>& y) -> State<4> {
      const Derivatives d = model.derivatives(y[0]);
      return {y[1], -m / r * y[1] - lambda * d.f, y[3], -m / r * y[3] - lambda * d.df * y[2]};
    };
    run<4>(rhs, prof, h0, y_start, s, specs, blowup_stops, floor_scale);
  }
  return prof;
}

}  // namespace

// ---------------------------------------------------------------------------
// Profile

template <std::size_t N>
State<N> Profile<N>::at(double r) const {
  if (radii_.empty() || !(r >= radii_.front()) || r > r_end() * (1.0 + 1e-12) + 1e-300) {
    throw Error(Errc::InvalidArgument, "r=" + format_double(r) + " outside the profile");
  }
  if (r <= head_.r_end && head_.r_end > 0.0) return head_eval<N>(head_, r, false);
  if (segments_.empty()) return states_.back();
  auto it = std::upper_bound(segments_.begin(), segments_.end(), r,
                             [](double x, const detail::DenseSegment<N>& s) { return x < s.r0; });
  if (it == segments_.begin()) return states_.front();
  return dense_eval<N>(*std::prev(it), r);
}

template <std::size_t N>
State<N> Profile<N>::slope_at(double r) const {
  if (radii_.empty() || !(r >= radii_.front()) || r > r_end() * (1.0 + 1e-12) + 1e-300) {
    throw Error(Errc::InvalidArgument, "r=" + format_double(r) + " outside the profile");
  }
  if (r <= head_.r_end && head_.r_end > 0.0) return head_eval<N>(head_, r, true);
  auto it = std::upper_bound(segments_.begin(), segments_.end(), r,
                             [](double x, const detail::DenseSegment<N>& s) { return x < s.r0; });
  if (it == segments_.begin()) throw Error(Errc::InvalidArgument, "no dense output before the first segment");
  return dense_slope<N>(*std::prev(it), r);
}

template <std::size_t N>
std::optional<double> Profile<N>::first_crossing(std::size_t component, double level) const {
  if (radii_.empty() || component >= N) return std::nullopt;
  const double g0 = states_.front()[component] - level;
  if (g0 == 0.0) return radii_.front();
  for (std::size_t i = 1; i < radii_.size(); ++i) {
    const double gi = states_[i][component] - level;
    if (gi == 0.0) return radii_[i];
    if ((gi > 0.0) != (g0 > 0.0)) {
      const double ga = states_[i - 1][component] - level;
      return illinois([&](double x) { return at(x)[component] - level; }, radii_[i - 1], radii_[i], ga, gi);
    }
  }
  return std::nullopt;
}

template <std::size_t N>
Profile<N> Profile<N>::rescaled(double R) const {
  if (!(R > 0.0)) throw Error(Errc::InvalidArgument, "rescale factor must be positive");
  Profile<N> out = *this;
  out.lambda = lambda * R * R;
  auto fix_state = [R](State<N>& y) {
    for (std::size_t i = 1; i < N; i += 2) y[i] *= R;
  };
  for (auto& r : out.radii_) r /= R;
  for (auto& y : out.states_) fix_state(y);
  for (auto& e : out.events) {
    e.r /= R;
    fix_state(e.state);
  }
  out.head_.r_end /= R;
  for (auto& seg : out.segments_) {
    seg.r0 /= R;
    seg.h /= R;
    for (auto& c : seg.c) fix_state(c);
  }
  return out;
}

template <std::size_t N>
Profile<N> Profile<N>::scaled(double c, std::size_t first) const {
  Profile<N> out = *this;
  auto mul = [c, first](State<N>& y) {
    for (std::size_t i = first; i < N; ++i) y[i] *= c;
  };
  if (first == 0) out.alpha = alpha * c;
  for (auto& y : out.states_) mul(y);
  for (auto& e : out.events) mul(e.state);
  for (std::size_t j = first / 2; j < N / 2; ++j) {
    for (auto& v : out.head_.coeffs[j]) v *= c;
  }
  for (auto& seg : out.segments_) {
    for (auto& s : seg.c) mul(s);
  }
  return out;
}

template <std::size_t N>
std::vector<double> Profile<N>::breakpoints() const {
  return radii_;
}

template class Profile<2>;
template class Profile<4>;

// ---------------------------------------------------------------------------

std::pair<double, double> series_start(const Nonlinearity& model, double alpha, double lambda, int n, double h) {
  const Derivatives d = model.derivatives(alpha);
  const double nn = double(n);
  const double pf = lambda * d.f * h * h;
  const double pdf = lambda * d.df * h * h;
  const double a2 = -pf / (2.0 * nn);
  const double a4 = pf * pdf / (8.0 * nn * (nn + 2.0));
  return {alpha + a2 + a4, (2.0 * a2 + 4.0 * a4) / h};
}

double start_radius(const Nonlinearity& model, double alpha, double lambda, int /*n*/,
                    const IntegratorSettings& settings) {
  return std::min(settings.h_init, 1e-3 * length_scale_at(model.derivatives(alpha), lambda));
}

RadialProfile integrate(const Nonlinearity& model, double alpha, double lambda, int n,
                        const IntegratorSettings& settings, EventMask stop) {
  return integrate_radial<2>(model, alpha, lambda, n, settings, stop);
}

VariationalProfile integrate_variational(const Nonlinearity& model, double alpha, double lambda, int n,
                                         const IntegratorSettings& settings, EventMask stop) {
  return integrate_radial<4>(model, alpha, lambda, n, settings, stop);
}

RadialProfile integrate_from(const Nonlinearity& model, double r0, const RadialState& y0, double lambda, int n,
                             const IntegratorSettings& settings, EventMask stop) {
  settings.validate();
  if (!(r0 > 0.0) || r0 >= settings.r_max) throw Error(Errc::InvalidArgument, "r0 must lie in (0, r_max)");
  if (n < 2 || !(lambda > 0.0)) throw Error(Errc::InvalidArgument, "need n >= 2 and lambda > 0");
  RadialProfile prof;
  prof.n = n;
  prof.alpha = y0[0];
  prof.lambda = lambda;
  prof.push_node(r0, y0);
  const double m = double(n) - 1.0;
  auto rhs = [&](double r, const State<2>& y) -> State<2> {
    return {y[1], -m / r * y[1] - lambda * model.derivatives(y[0]).f};
  };
  run<2>(rhs, prof, r0, y0, settings, event_specs(stop, settings, r0), stop.contains(EventKind::Blowup), 1.0);
  return prof;
}

double ode_residual(const RadialProfile& profile, const Nonlinearity& model, double r) {
  if (!(r > 0.0)) throw Error(Errc::InvalidArgument, "residual needs r > 0");
  const RadialState y = profile.at(r);
  const RadialState dy = profile.slope_at(r);
  return dy[1] + (profile.n - 1.0) / r * y[1] + profile.lambda * model.value(y[0]);
}

}  // namespace radbif
