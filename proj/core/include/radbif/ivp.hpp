#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "radbif/model.hpp"

namespace radbif {

/// Tolerances and limits for the radial integrator.
struct IntegratorSettings {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double h_init = 1e-4;
  double h_min = 1e-14;  // relative to max(r, initial length scale)
  double r_max = 50.0;
  double u_max = 1e6;
  double u_margin = 1e-3;

  /// Throws Errc::InvalidArgument unless all positive and h_min < h_init < r_max.
  void validate() const;
};

enum class EventKind : std::uint8_t { ZeroCrossing, DerivativeZero, Blowup, RangeExceeded };

std::string_view to_string(EventKind kind);

/// Set of events that stop an integration.
class EventMask {
 public:
  constexpr EventMask() = default;
  constexpr EventMask(std::initializer_list<EventKind> kinds) {
    for (EventKind k : kinds) bits_ |= bit(k);
  }
  constexpr bool contains(EventKind k) const { return (bits_ & bit(k)) != 0; }
  constexpr EventMask& add(EventKind k) {
    bits_ |= bit(k);
    return *this;
  }

 private:
  static constexpr std::uint8_t bit(EventKind k) { return std::uint8_t(1u << static_cast<unsigned>(k)); }
  std::uint8_t bits_ = 0;
};

/// Components are (value, derivative) pairs: (u, u') and, for N = 4, (w, w').
template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
struct EventRecord {
  EventKind kind;
  double r;
  State<N> state;
};

namespace detail {

// Even-power Taylor head used on [0, r_end]: value_j(r) = c0 + c1 s + c2 s^2 with s = (r / r_end)^2.
template <std::size_t N>
struct SeriesHead {
  double r_end = 0.0;
  std::array<std::array<double, 3>, N / 2> coeffs{};
};

// Dormand-Prince continuous extension on [r0, r0 + h].
template <std::size_t N>
struct DenseSegment {
  double r0 = 0.0;
  double h = 0.0;
  std::array<State<N>, 5> c{};
};

}  // namespace detail

/// A radial solution r -> (u, u') (N = 2) or r -> (u, u', w, w') (N = 4) with dense output.
///
/// Nodes start at r = 0 with zero derivatives and increase strictly. Evaluation
/// between nodes uses the integrator's 4th-order interpolant; below the first
/// node it uses the Taylor series the integration was started from.
template <std::size_t N>
class Profile {
 public:
  static_assert(N == 2 || N == 4);

  int n = 2;
  double alpha = 0.0;
  double lambda = 0.0;
  std::vector<EventRecord<N>> events;

  const std::vector<double>& radii() const { return radii_; }
  const std::vector<State<N>>& states() const { return states_; }
  std::size_t size() const { return radii_.size(); }
  double r_end() const { return radii_.empty() ? 0.0 : radii_.back(); }

  /// Dense evaluation on [0, r_end]. Throws Errc::InvalidArgument outside.
  State<N> at(double r) const;

  /// d/dr of the interpolant (used for residual checks).
  State<N> slope_at(double r) const;

  /// Smallest r with component(r) == level on a sign change of the interpolant.
  std::optional<double> first_crossing(std::size_t component, double level) const;

  /// r -> r / R; derivative components scale by R and lambda by R^2.
  Profile rescaled(double R) const;

  /// Multiplies components first..N-1 (values and derivatives) by c; alpha follows component 0.
  Profile scaled(double c, std::size_t first = 0) const;

  /// 0, the end of the series head, and every integrator node.
  std::vector<double> breakpoints() const;

  /// Appends a node; the integrator and the deserializers use this.
  void push_node(double r, const State<N>& y) {
    radii_.push_back(r);
    states_.push_back(y);
  }
  void set_head(const detail::SeriesHead<N>& head) { head_ = head; }
  void push_segment(const detail::DenseSegment<N>& seg) { segments_.push_back(seg); }
  void replace_last_segment(const detail::DenseSegment<N>& seg) { segments_.back() = seg; }
  bool has_dense_output() const { return head_.r_end > 0.0 || !segments_.empty(); }

 private:
  std::vector<double> radii_;
  std::vector<State<N>> states_;
  detail::SeriesHead<N> head_{};
  std::vector<detail::DenseSegment<N>> segments_;
};

using RadialState = State<2>;
using RadialProfile = Profile<2>;
using VariationalProfile = Profile<4>;

/// Two-term Taylor state (u, u') at r = h for u(0) = alpha, u'(0) = 0.
std::pair<double, double> series_start(const Nonlinearity& model, double alpha, double lambda, int n, double h);

/// Radius at which integration leaves the series head for these arguments.
double start_radius(const Nonlinearity& model, double alpha, double lambda, int n, const IntegratorSettings& settings);

/// Integrates u'' + (n-1)/r u' + lambda f(u) = 0, u(0) = alpha, u'(0) = 0 until the first
/// requested event or r_max.
RadialProfile integrate(const Nonlinearity& model, double alpha, double lambda, int n,
                        const IntegratorSettings& settings, EventMask stop);

/// Same ODE plus its variational equation w'' + (n-1)/r w' + lambda f'(u) w = 0,
/// w(0) = 1, w'(0) = 0. Events are detected on (u, u') only.
VariationalProfile integrate_variational(const Nonlinearity& model, double alpha, double lambda, int n,
                                         const IntegratorSettings& settings, EventMask stop);

/// Continues the radial IVP from an interior state (r0 > 0) without a series head.
RadialProfile integrate_from(const Nonlinearity& model, double r0, const RadialState& y0, double lambda, int n,
                             const IntegratorSettings& settings, EventMask stop);

/// u'' + (n-1)/r u' + lambda f(u) evaluated on the interpolant at r > 0.
double ode_residual(const RadialProfile& profile, const Nonlinearity& model, double r);

}  // namespace radbif
