#include "radbif/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "radbif/curve.hpp"
#include "radbif/errors.hpp"
#include "radbif/io.hpp"
#include "radbif/linearized.hpp"
#include "radbif/model.hpp"
#include "radbif/shoot.hpp"
#include "radbif/transform.hpp"

namespace radbif {

namespace {

using nlohmann::json;

constexpr const char* kSchemaVersion = "1";

struct Options {
  // model
  std::string family;
  std::string epsilon, b, c, p, q, a, c0;
  int n = 2;
  // ranges and controls
  std::string alpha_range;
  std::string epsilons;
  std::string bracket = "0.22:0.25";
  double tolerance = 1e-3;
  std::optional<double> at_alpha;
  std::optional<double> profile_alpha;
  std::string dump_profile;
  int grid_points = 41;
  double max_discrepancy = 1e-6;
  // output
  std::string out_path;
  std::string format = "csv";
  bool quiet = false;
  unsigned jobs = 1;
  std::string config;
  // numerics
  TraceOptions trace;
};

void add_model_options(CLI::App* sub, Options& o) {
  sub->add_option("--family", o.family,
                  "perturbed_gelfand | gelfand | mu_form | limiting | cubic | power_sum | exp_shift | constant");
  sub->add_option("--epsilon", o.epsilon, "epsilon parameter");
  sub->add_option("--b", o.b, "cubic middle root b");
  sub->add_option("--c", o.c, "cubic upper root c");
  sub->add_option("--p", o.p, "power-sum exponent p");
  sub->add_option("--q", o.q, "power-sum exponent q");
  sub->add_option("--a", o.a, "shift a of exp(-1/(u+a))");
  sub->add_option("--c0", o.c0, "constant value");
}

void add_common_options(CLI::App* sub, Options& o) {
  sub->add_option("--n", o.n, "space dimension")->capture_default_str();
  sub->add_option("--out", o.out_path, "write data to this file");
  sub->add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  sub->add_flag("--quiet", o.quiet, "suppress the summary on stdout");
  sub->add_option("--jobs", o.jobs, "worker threads (0 = all cores)")->capture_default_str();
  sub->add_option("--config", o.config, "key=value file; explicit flags take precedence");
  auto& s = o.trace.integrator;
  sub->add_option("--abs-tol", s.abs_tol, "integrator absolute tolerance")->capture_default_str();
  sub->add_option("--rel-tol", s.rel_tol, "integrator relative tolerance")->capture_default_str();
  sub->add_option("--h-init", s.h_init, "initial step")->capture_default_str();
  sub->add_option("--h-min", s.h_min, "relative minimum step")->capture_default_str();
  sub->add_option("--r-max", s.r_max, "largest radius of a shot")->capture_default_str();
  sub->add_option("--u-max", s.u_max, "upper range limit of u")->capture_default_str();
  sub->add_option("--points", o.trace.initial_points, "initial alpha grid size")->capture_default_str();
  sub->add_option("--max-points", o.trace.max_points, "alpha sample cap")->capture_default_str();
}

void add_range_option(CLI::App* sub, Options& o) {
  sub->add_option("--alpha-range", o.alpha_range, "alpha interval lo:hi");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(item);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

std::pair<double, double> parse_range(const std::string& text, const char* what) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw Error(Errc::InvalidArgument, std::string(what) + " must look like lo:hi");
  return {parse_double(parts[0], what), parse_double(parts[1], what)};
}

std::vector<double> parse_epsilons(const std::string& text) {
  std::vector<double> values;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw Error(Errc::InvalidArgument, "--epsilons must be lo:hi:step or a comma list");
    const double lo = parse_double(parts[0], "--epsilons");
    const double hi = parse_double(parts[1], "--epsilons");
    const double step = parse_double(parts[2], "--epsilons");
    if (!(step > 0.0)) throw Error(Errc::InvalidArgument, "--epsilons step must be positive");
    for (int i = 0;; ++i) {
      const double v = lo + i * step;
      if (v > hi + 1e-9 * step) break;
      values.push_back(std::stod(fmt::format("{:.12g}", v)));
    }
  } else {
    for (const auto& part : split(text, ',')) {
      if (!part.empty()) values.push_back(parse_double(part, "--epsilons"));
    }
  }
  if (values.empty()) throw Error(Errc::InvalidArgument, "epsilon list is empty");
  return values;
}

Nonlinearity build_model(const Options& o, const std::string& default_family) {
  std::map<std::string, std::string> keys;
  keys["family"] = o.family.empty() ? default_family : o.family;
  const std::vector<std::pair<const char*, const std::string*>> given{
      {"epsilon", &o.epsilon}, {"b", &o.b}, {"c", &o.c}, {"p", &o.p}, {"q", &o.q}, {"a", &o.a}, {"c0", &o.c0}};
  for (const auto& [key, value] : given) {
    if (!value->empty()) keys[key] = *value;
  }
  const std::map<std::string, std::map<std::string, std::string>> defaults{
      {"perturbed_gelfand", {{"epsilon", "0.22"}}},
      {"mu_form", {{"epsilon", "0.22"}}},
      {"cubic", {{"epsilon", "0.05"}, {"b", "1"}, {"c", "2.5"}}},
      {"power_sum", {{"p", "1"}, {"q", "2"}}},
      {"exp_shift", {{"a", "0"}}},
      {"constant", {{"c0", "1"}}}};
  if (auto it = defaults.find(keys["family"]); it != defaults.end()) {
    for (const auto& [key, value] : it->second) keys.emplace(key, value);
  }
  return model_from_keys(keys);
}

std::pair<double, double> default_range(const Nonlinearity& model) {
  switch (model.family()) {
    case Family::PerturbedGelfand: return default_alpha_range(model.epsilon());
    case Family::Limiting: return {0.2, 10.0};
    case Family::Cubic: return {1e-3, model.c() - 0.01};
    default: break;
  }
  return {1e-3, 200.0};
}

std::pair<double, double> alpha_range_for(const Options& o, const Nonlinearity& model) {
  return o.alpha_range.empty() ? default_range(model) : parse_range(o.alpha_range, "--alpha-range");
}

json document(const char* command) { return {{"schema_version", kSchemaVersion}, {"command", command}}; }

// Writes data to --out and the summary (or the JSON document) to stdout.
void emit(const Options& o, std::ostream& out, const json& doc, const std::function<void(std::ostream&)>& csv,
          const std::string& summary) {
  const bool as_json = o.format == "json";
  if (!o.out_path.empty()) {
    std::ofstream file(o.out_path, std::ios::binary);
    if (!file) throw Error(Errc::InvalidArgument, "cannot open '" + o.out_path + "' for writing");
    if (as_json) {
      file << doc.dump(2) << '\n';
    } else {
      csv(file);
    }
  }
  if (as_json && o.out_path.empty()) {
    out << doc.dump(2) << '\n';
  } else if (!o.quiet) {
    out << summary;
  }
}

std::string fold_lines(const std::vector<TurningPoint>& folds) {
  std::string s;
  for (const TurningPoint& tp : folds) {
    s += fmt::format("fold kind={} alpha={} lambda={}\n", to_string(tp.kind), format_double(tp.alpha_star),
                     format_double(tp.lambda_star));
  }
  return s;
}

std::string shape_line(const CurveShape& shape) {
  return fmt::format("shape={} turning_points={}\n", to_string(shape), shape.turning_points);
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

TraceOptions trace_options(const Options& o) {
  TraceOptions t = o.trace;
  t.jobs = o.jobs;
  return t;
}

int cmd_trace(const Options& o, std::ostream& out, std::ostream& err) {
  const Nonlinearity model = build_model(o, "perturbed_gelfand");
  const auto [lo, hi] = alpha_range_for(o, model);
  const TraceOptions t = trace_options(o);
  if (!o.dump_profile.empty() && !o.profile_alpha) {
    throw Error(Errc::InvalidArgument, "--dump-profile needs --profile-alpha");
  }
  const BifurcationCurve curve = trace(model, o.n, lo, hi, t);
  print_warnings(curve.warnings, err);
  json doc = document("trace");
  doc["curve"] = to_json(curve);
  emit(o, out, doc, [&](std::ostream& f) { write_curve_csv(f, curve); },
       shape_line(curve.shape) + fold_lines(curve.turning_points));

  if (!o.dump_profile.empty()) {
    const auto bvp = bvp_profile(model, *o.profile_alpha, o.n, t.integrator);
    if (!bvp) {
      throw Error(Errc::NotApplicable, "no Dirichlet solution with alpha=" + format_double(*o.profile_alpha));
    }
    std::ofstream file(o.dump_profile, std::ios::binary);
    if (!file) throw Error(Errc::InvalidArgument, "cannot open '" + o.dump_profile + "' for writing");
    if (o.format == "json") {
      json pdoc = document("profile");
      pdoc["profile"] = to_json(bvp->profile);
      pdoc["boundary_residual"] = bvp->boundary_residual;
      file << pdoc.dump(2) << '\n';
    } else {
      write_profile_csv(file, bvp->profile);
    }
  }
  return kExitOk;
}

int cmd_scan(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.epsilons.empty()) throw Error(Errc::InvalidArgument, "--epsilons is required");
  const std::vector<double> eps = parse_epsilons(o.epsilons);
  const Nonlinearity family = build_model(o, "perturbed_gelfand");
  std::pair<double, double> range{0.0, 0.0};
  if (!o.alpha_range.empty()) range = parse_range(o.alpha_range, "--alpha-range");
  const ScanTable table = scan_epsilon(family, eps, o.n, range, trace_options(o));
  print_warnings(table.warnings, err);
  std::string summary;
  for (const ScanRow& row : table.rows) {
    summary += fmt::format("epsilon={} shape={} turning_points={}\n", format_double(row.epsilon),
                           to_string(row.shape), row.turning_points.size());
  }
  json doc = document("scan");
  doc["family"] = to_string(family.family());
  doc["n"] = o.n;
  doc["table"] = to_json(table);
  emit(o, out, doc, [&](std::ostream& f) { write_scan_csv(f, table); }, summary);
  return kExitOk;
}

int cmd_find_eps0(const Options& o, std::ostream& out, std::ostream&) {
  const auto [ea, eb] = parse_range(o.bracket, "--bracket");
  if (!(ea < eb)) throw Error(Errc::InvalidArgument, "--bracket must satisfy a < b");
  const Nonlinearity family = build_model(o, "perturbed_gelfand");
  const Epsilon0 e = find_epsilon0(family, ea, eb, o.n, o.tolerance, trace_options(o));
  const double width = std::abs(e.hi - e.lo);
  json doc = document("find-eps0");
  doc["epsilon0"] = e.epsilon0;
  doc["bracket"] = {std::min(e.lo, e.hi), std::max(e.lo, e.hi)};
  doc["folded_end"] = e.lo;
  doc["width"] = width;
  doc["bisections"] = e.bisections;
  const std::string summary = fmt::format("epsilon0={} bracket=[{}, {}] width={}\n", format_double(e.epsilon0),
                                          format_double(std::min(e.lo, e.hi)), format_double(std::max(e.lo, e.hi)),
                                          format_double(width));
  emit(o, out, doc,
       [&](std::ostream& f) {
         f << "epsilon0,lo,hi,width\n"
           << format_double(e.epsilon0) << ',' << format_double(std::min(e.lo, e.hi)) << ','
           << format_double(std::max(e.lo, e.hi)) << ',' << format_double(width) << '\n';
       },
       summary);
  return kExitOk;
}

// Runs every certificate at one solution; inapplicable ones are recorded as skipped.
std::vector<CertificateReport> certify(const Nonlinearity& model, double alpha, int n, const IntegratorSettings& s,
                                       std::vector<std::string>& skipped) {
  const auto bvp = bvp_profile(model, alpha, n, s);
  if (!bvp) throw Error(Errc::NotApplicable, "no Dirichlet solution with alpha=" + format_double(alpha));
  const LinearizedProfile lin = solve_linearized(model, *bvp, n, s);
  std::vector<CertificateReport> reports;
  reports.push_back(positivity_certificate(lin));
  reports.push_back(nondegeneracy(model, *bvp, lin, n));
  try {
    reports.push_back(test_function_search(model, *bvp, n));
  } catch (const Error& e) {
    if (e.code() != Errc::NotApplicable) throw;
    skipped.push_back("test_function: " + std::string(e.what()));
  }
  try {
    reports.push_back(sturm_nonsingularity_check(model, *bvp, lin, n));
  } catch (const Error& e) {
    if (e.code() != Errc::PreconditionFails) throw;
    skipped.push_back("non_singularity: " + std::string(e.what()));
  }
  return reports;
}

std::string certificate_cell(const CertificateReport& r) {
  std::string cell = fmt::format("{}={}", to_string(r.kind), r.pass ? "pass" : "FAIL");
  if (!r.margins.empty()) cell += fmt::format("({}={})", r.margins.front().first, format_double(r.margins.front().second));
  return cell;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  const Nonlinearity model = build_model(o, "perturbed_gelfand");
  const TraceOptions t = trace_options(o);
  std::vector<TurningPoint> sites;
  if (o.at_alpha) {
    TurningPoint tp;
    tp.alpha_star = *o.at_alpha;
    const auto lam = lambda_of_alpha(model, tp.alpha_star, o.n, t.integrator);
    if (!lam) throw Error(Errc::NotApplicable, "no Dirichlet solution with alpha=" + format_double(tp.alpha_star));
    tp.lambda_star = lam->lambda;
    sites.push_back(tp);
  } else {
    const auto [lo, hi] = alpha_range_for(o, model);
    BifurcationCurve curve = trace(model, o.n, lo, hi, t);
    print_warnings(curve.warnings, err);
    sites = curve.turning_points;
  }

  bool all_pass = true;
  std::string summary;
  json folds = json::array();
  std::vector<std::vector<std::string>> skipped(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) {
    sites[i].certificates = certify(model, sites[i].alpha_star, o.n, t.integrator, skipped[i]);
    std::string line = fmt::format("fold {} kind={} alpha={} lambda={}", i + 1,
                                   o.at_alpha ? "point" : std::string(to_string(sites[i].kind)),
                                   format_double(sites[i].alpha_star), format_double(sites[i].lambda_star));
    for (const auto& c : sites[i].certificates) {
      all_pass = all_pass && c.pass;
      line += " " + certificate_cell(c);
    }
    for (const auto& s : skipped[i]) line += " [skipped " + s.substr(0, s.find(':')) + "]";
    summary += line + "\n";
    json j = to_json(sites[i]);
    j["skipped"] = skipped[i];
    folds.push_back(std::move(j));
  }
  if (sites.empty()) summary += "no folds\n";
  summary += fmt::format("verified={}\n", all_pass ? "pass" : "fail");

  json doc = document("verify");
  doc["model"] = model.describe();
  doc["n"] = o.n;
  doc["folds"] = std::move(folds);
  doc["all_pass"] = all_pass;
  emit(o, out, doc,
       [&](std::ostream& f) {
         f << "alpha,lambda,certificate,pass\n";
         for (const auto& tp : sites) {
           for (const auto& c : tp.certificates) {
             f << format_double(tp.alpha_star) << ',' << format_double(tp.lambda_star) << ',' << to_string(c.kind)
               << ',' << (c.pass ? "pass" : "fail") << '\n';
           }
         }
       },
       summary);
  return all_pass ? kExitOk : kExitMath;
}

int cmd_limiting(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.n != 2) throw Error(Errc::InvalidArgument, "the limiting problem is analysed for n = 2 only");
  if (!o.family.empty() && o.family != "limiting") throw Error(Errc::InvalidArgument, "limiting takes no --family");
  const Nonlinearity model = Nonlinearity::limiting();
  const auto [lo, hi] = alpha_range_for(o, model);
  const BifurcationCurve curve = trace(model, 2, lo, hi, trace_options(o));
  print_warnings(curve.warnings, err);
  if (curve.turning_points.empty()) throw Error(Errc::BracketLost, "no fold on the limiting curve in range");
  const TurningPoint& fold = curve.turning_points.front();
  json doc = document("limiting");
  doc["eta0"] = fold.lambda_star;
  doc["v0"] = fold.alpha_star;
  doc["fold_kind"] = to_string(fold.kind);
  doc["curve"] = to_json(curve);
  const std::string summary = fmt::format("eta0={:.6f} v0={:.6f} kind={}\n", fold.lambda_star, fold.alpha_star,
                                          to_string(fold.kind)) +
                              shape_line(curve.shape);
  emit(o, out, doc, [&](std::ostream& f) { write_curve_csv(f, curve); }, summary);
  return kExitOk;
}

int cmd_map42(const Options& o, std::ostream& out, std::ostream&) {
  if (o.epsilon.empty()) throw Error(Errc::InvalidArgument, "--epsilon is required");
  const double eps = parse_double(o.epsilon, "--epsilon");
  if (!(eps > 0.0)) throw Error(Errc::InvalidArgument, "--epsilon must be positive");
  if (o.grid_points < 2) throw Error(Errc::InvalidArgument, "--count must be at least 2");
  mu_from_lambda(1.0, eps);
  const double v0 = limiting_fold().v0;
  if (!(eps < v0)) {
    throw Error(Errc::PreconditionFails, fmt::format("need epsilon < v0(0) = {:.6f}", v0));
  }
  double lo = std::max(1.6, eps + 1.0);
  double hi = lo + 4.0;
  if (!o.alpha_range.empty()) std::tie(lo, hi) = parse_range(o.alpha_range, "--alpha-range");
  if (!(lo < hi) || !(lo > v0)) {
    throw Error(Errc::InvalidArgument, fmt::format("alpha grid must satisfy v0(0) = {:.6f} < lo < hi", v0));
  }
  std::vector<double> grid(std::size_t(o.grid_points));
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = lo + (hi - lo) * double(i) / double(grid.size() - 1);
  const Lemma42Sweep sweep = lemma42_sweep(eps, grid, o.trace.integrator, o.jobs);
  const bool pass = sweep.monotonicity.pass && sweep.max_relative_discrepancy < o.max_discrepancy;

  json doc = document("map42");
  doc["epsilon"] = eps;
  doc["v0"] = v0;
  json mapped = json::array();
  json direct = json::array();
  for (const auto& p : sweep.mapped) mapped.push_back(to_json(p));
  for (const auto& p : sweep.direct) direct.push_back(to_json(p));
  doc["mapped"] = std::move(mapped);
  doc["direct"] = std::move(direct);
  doc["max_relative_discrepancy"] = sweep.max_relative_discrepancy;
  doc["max_residual"] = sweep.max_residual;
  doc["monotonicity"] = to_json(sweep.monotonicity);
  doc["pass"] = pass;
  const std::string summary = fmt::format(
      "epsilon={} points={} monotone={} max_rel_discrepancy={:.3e} max_residual={:.3e}\n", format_double(eps),
      grid.size(), sweep.monotonicity.pass ? "pass" : "fail", sweep.max_relative_discrepancy, sweep.max_residual);
  emit(o, out, doc,
       [&](std::ostream& f) {
         std::vector<MuPoint> all = sweep.mapped;
         all.insert(all.end(), sweep.direct.begin(), sweep.direct.end());
         write_mu_csv(f, all);
       },
       summary);
  return pass ? kExitOk : kExitMath;
}

int cmd_cubic(const Options& o, std::ostream& out, std::ostream& err) {
  if (!o.family.empty() && o.family != "cubic") throw Error(Errc::InvalidArgument, "cubic takes no --family");
  Options co = o;
  co.family = "cubic";
  const Nonlinearity model = build_model(co, "cubic");
  if (!cubic_separation_holds(model)) {
    err << "warning: c <= 2b; the two-branch structure is not guaranteed\n";
  }
  const auto [lo, hi] = alpha_range_for(o, model);
  const BifurcationCurve curve = trace(model, o.n, lo, hi, trace_options(o));
  print_warnings(curve.warnings, err);
  std::string summary = shape_line(curve.shape);
  for (std::size_t i = 0; i < curve.shape.segments.size(); ++i) {
    const SegmentShape& s = curve.shape.segments[i];
    std::string turns;
    for (TurnKind k : s.turns) turns += (turns.empty() ? "" : ",") + std::string(to_string(k));
    summary += fmt::format("segment {} alpha=[{}, {}] shape={} turns=[{}]\n", i + 1, format_double(s.alpha_lo),
                           format_double(s.alpha_hi), to_string(s), turns);
  }
  summary += fold_lines(curve.turning_points);
  json doc = document("cubic");
  doc["separation_holds"] = cubic_separation_holds(model);
  doc["curve"] = to_json(curve);
  emit(o, out, doc, [&](std::ostream& f) { write_curve_csv(f, curve); }, summary);
  return kExitOk;
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::InvalidArgument:
    case Errc::InvalidModel:
    case Errc::InvalidOrder: return kExitUsage;
    default: return kExitMath;
  }
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty() || args.empty()) return args;
  std::ifstream file(path);
  if (!file) throw Error(Errc::InvalidArgument, "cannot read config file '" + path + "'");
  std::vector<std::string> inserted;
  std::string line;
  int lineno = 0;
  while (std::getline(file, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string key = eq == std::string::npos ? "" : trim(line.substr(0, eq));
    const std::string value = eq == std::string::npos ? "" : trim(line.substr(eq + 1));
    const bool key_ok = !key.empty() && std::all_of(key.begin(), key.end(), [](char ch) {
      return (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '-' || ch == '_';
    });
    if (!key_ok || key == "config") {
      throw Error(Errc::InvalidArgument, fmt::format("{}:{}: expected key=value", path, lineno));
    }
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (key == "quiet") {
      if (value == "true" || value == "1") inserted.push_back(flag);
      else if (value != "false" && value != "0") {
        throw Error(Errc::InvalidArgument, fmt::format("{}:{}: quiet must be true or false", path, lineno));
      }
      continue;
    }
    inserted.push_back(flag);
    inserted.push_back(value);
  }
  std::vector<std::string> out{args.front()};
  out.insert(out.end(), inserted.begin(), inserted.end());
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bifurcation curves of radial semilinear Dirichlet problems by shoot-and-scale", "radbif"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  Options o;

  auto* trace_cmd = app.add_subcommand("trace", "trace lambda(alpha), classify the curve, list folds");
  auto* scan_cmd = app.add_subcommand("scan", "trace and classify over a list of epsilon values");
  auto* eps0_cmd = app.add_subcommand("find-eps0", "bisect epsilon between a folded and a monotone curve");
  auto* verify_cmd = app.add_subcommand("verify", "linearized certificates at every fold");
  auto* limiting_cmd = app.add_subcommand("limiting", "fold (eta0, v0(0)) of the limiting problem");
  auto* map42_cmd = app.add_subcommand("map42", "limiting-to-mu-form map, monotonicity and cross-validation");
  auto* cubic_cmd = app.add_subcommand("cubic", "two-branch structure of the cubic problem");

  for (auto* sub : {trace_cmd, scan_cmd, eps0_cmd, verify_cmd, cubic_cmd}) add_model_options(sub, o);
  limiting_cmd->add_option("--family", o.family, "must be limiting if given");
  map42_cmd->add_option("--epsilon", o.epsilon, "mu-form epsilon (0 < eps < v0(0))");
  for (auto* sub : {trace_cmd, scan_cmd, eps0_cmd, verify_cmd, limiting_cmd, map42_cmd, cubic_cmd}) {
    add_common_options(sub, o);
  }
  for (auto* sub : {trace_cmd, scan_cmd, verify_cmd, limiting_cmd, map42_cmd, cubic_cmd}) add_range_option(sub, o);
  trace_cmd->add_option("--dump-profile", o.dump_profile, "write the solution at --profile-alpha to this file");
  trace_cmd->add_option("--profile-alpha", o.profile_alpha, "alpha of the dumped profile");
  scan_cmd->add_option("--epsilons", o.epsilons, "lo:hi:step or comma separated list");
  eps0_cmd->add_option("--bracket", o.bracket, "epsilon bracket a:b")->capture_default_str();
  eps0_cmd->add_option("--tolerance", o.tolerance, "final bracket width")->capture_default_str();
  verify_cmd->add_option("--at-alpha", o.at_alpha, "certify this alpha instead of the traced folds");
  map42_cmd->add_option("--count", o.grid_points, "alpha grid size")->capture_default_str();
  map42_cmd->add_option("--max-discrepancy", o.max_discrepancy, "allowed mapped/direct mu mismatch")
      ->capture_default_str();

  try {
    std::vector<std::string> argv = expand_config(args);
    std::reverse(argv.begin(), argv.end());
    app.parse(std::move(argv));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (o.n < 2) throw Error(Errc::InvalidArgument, "--n must be at least 2");
    if (*trace_cmd) return cmd_trace(o, out, err);
    if (*scan_cmd) return cmd_scan(o, out, err);
    if (*eps0_cmd) return cmd_find_eps0(o, out, err);
    if (*verify_cmd) return cmd_verify(o, out, err);
    if (*limiting_cmd) return cmd_limiting(o, out, err);
    if (*map42_cmd) return cmd_map42(o, out, err);
    if (*cubic_cmd) return cmd_cubic(o, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  return kExitUsage;
}

}  // namespace radbif
