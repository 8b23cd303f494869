#include "radbif/io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <system_error>

#include "radbif/errors.hpp"
#include "radbif/format.hpp"

namespace radbif {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw Error(Errc::InvalidArgument, "cannot format number");
  return std::string(buf, end);
}

double parse_double(std::string_view text, std::string_view what) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw Error(Errc::InvalidArgument, std::string(what) + ": not a finite number: '" + std::string(text) + "'");
  }
  return value;
}

namespace {

using nlohmann::json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string outcome_of(const CurvePoint& p) {
  return p.reached_zero ? std::string("zero") : std::string(to_string(p.reason));
}

}  // namespace

void write_profile_csv(std::ostream& out, const RadialProfile& profile) {
  out << "r,u,du\n";
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const auto& y = profile.states()[i];
    out << format_double(profile.radii()[i]) << ',' << format_double(y[0]) << ',' << format_double(y[1]) << '\n';
  }
}

void write_curve_csv(std::ostream& out, const BifurcationCurve& curve) {
  out << "alpha,lambda,outcome\n";
  for (const CurvePoint& p : curve.samples) {
    out << format_double(p.alpha) << ',' << format_double(p.lambda) << ',' << outcome_of(p) << '\n';
  }
}

void write_mu_csv(std::ostream& out, const std::vector<MuPoint>& points) {
  out << "w0,mu,source\n";
  for (const MuPoint& p : points) {
    out << format_double(p.w0) << ',' << format_double(p.mu) << ',' << to_string(p.source) << '\n';
  }
}

void write_scan_csv(std::ostream& out, const ScanTable& table) {
  out << "epsilon,shape,n_turns\n";
  for (const ScanRow& row : table.rows) {
    out << format_double(row.epsilon) << ',' << to_string(row.shape) << ',' << row.turning_points.size() << '\n';
  }
}

json to_json(const RadialProfile& profile) {
  json nodes = json::array();
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const auto& y = profile.states()[i];
    nodes.push_back({number(profile.radii()[i]), number(y[0]), number(y[1])});
  }
  json events = json::array();
  for (const auto& e : profile.events) {
    events.push_back({{"kind", to_string(e.kind)}, {"r", number(e.r)}, {"u", number(e.state[0])},
                      {"du", number(e.state[1])}});
  }
  return {{"n", profile.n},
          {"alpha", number(profile.alpha)},
          {"lambda", number(profile.lambda)},
          {"columns", {"r", "u", "du"}},
          {"nodes", std::move(nodes)},
          {"events", std::move(events)}};
}

json to_json(const CertificateReport& report) {
  json margins = json::object();
  for (const auto& [name, value] : report.margins) margins[name] = number(value);
  return {{"kind", to_string(report.kind)}, {"pass", report.pass}, {"margins", margins}, {"details", report.details}};
}

json to_json(const TurningPoint& tp) {
  json certs = json::array();
  for (const auto& c : tp.certificates) certs.push_back(to_json(c));
  return {{"alpha", number(tp.alpha_star)},
          {"lambda", number(tp.lambda_star)},
          {"kind", to_string(tp.kind)},
          {"w_at_1", number(tp.w_at_1)},
          {"cross_check", number(tp.cross_check)},
          {"certificates", std::move(certs)}};
}

json to_json(const CurveShape& shape) {
  json segments = json::array();
  for (const SegmentShape& s : shape.segments) {
    json turns = json::array();
    for (TurnKind k : s.turns) turns.push_back(to_string(k));
    segments.push_back({{"alpha_lo", number(s.alpha_lo)},
                        {"alpha_hi", number(s.alpha_hi)},
                        {"shape", to_string(s)},
                        {"turns", std::move(turns)}});
  }
  return {{"name", to_string(shape)}, {"turning_points", shape.turning_points}, {"segments", std::move(segments)}};
}

json to_json(const BifurcationCurve& curve) {
  json points = json::array();
  json stalls = json::array();
  for (const CurvePoint& p : curve.samples) {
    if (p.reached_zero) {
      points.push_back({{"alpha", number(p.alpha)},
                        {"lambda", number(p.lambda)},
                        {"log_slope", number(p.log_slope)},
                        {"w_at_R", number(p.w_at_R)}});
    } else {
      stalls.push_back({{"alpha", number(p.alpha)}, {"reason", to_string(p.reason)}});
    }
  }
  json gaps = json::array();
  for (const Gap& g : curve.gaps) {
    gaps.push_back({{"lo", number(g.lo)}, {"hi", number(g.hi)}, {"reason", to_string(g.reason)}});
  }
  json folds = json::array();
  for (const TurningPoint& tp : curve.turning_points) folds.push_back(to_json(tp));
  return {{"model", curve.model.describe()},
          {"n", curve.n},
          {"alpha_range", {number(curve.alpha_lo), number(curve.alpha_hi)}},
          {"points", std::move(points)},
          {"no_descent", std::move(stalls)},
          {"gaps", std::move(gaps)},
          {"turning_points", std::move(folds)},
          {"shape", to_json(curve.shape)},
          {"warnings", curve.warnings}};
}

json to_json(const MuPoint& p) {
  json j = {{"w0", number(p.w0)}, {"mu", number(p.mu)}, {"source", to_string(p.source)},
            {"lambda", number(p.lambda)}};
  if (p.source == MuSource::Lemma42Map) {
    j["alpha"] = number(p.alpha);
    j["a"] = number(p.a);
  }
  return j;
}

json to_json(const ScanTable& table) {
  json rows = json::array();
  for (const ScanRow& row : table.rows) {
    json folds = json::array();
    for (const TurningPoint& tp : row.turning_points) folds.push_back(to_json(tp));
    rows.push_back({{"epsilon", number(row.epsilon)},
                    {"shape", to_json(row.shape)},
                    {"n_turns", row.turning_points.size()},
                    {"turning_points", std::move(folds)}});
  }
  return {{"rows", std::move(rows)}, {"warnings", table.warnings}};
}

}  // namespace radbif
