#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <nlohmann/json.hpp>

#include "radbif/cli.hpp"

using namespace radbif;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "radbif_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("trace") {
  const fs::path out = scratch("curve.csv");
  const Run r = run({"trace", "--family", "perturbed_gelfand", "--epsilon", "0.22", "--n", "2", "--alpha-range",
                     "1e-3:200", "--out", out.string()});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("shape=S-shaped turning_points=2\n", 0) == 0);
  CHECK(slurp(out).rfind("alpha,lambda,outcome\n", 0) == 0);
  CHECK(run({"trace", "--epsilon", "0.245"}).out.rfind("shape=monotone turning_points=0\n", 0) == 0);
  CHECK(run({"trace", "--epsilon", "0.22", "--quiet"}).out.empty());
}

TEST_CASE("usage errors exit 1") {
  const Run bad = run({"trace", "--no-such-flag"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("Usage") != std::string::npos);
  CHECK(run({}).code == 1);
  CHECK(run({"trace", "--format", "xml"}).code == 1);
  CHECK(run({"trace", "--alpha-range", "1:2:3"}).code == 1);
  CHECK(run({"trace", "--family", "cubic", "--epsilon", "2"}).code == 1);
  CHECK(run({"trace", "--n", "1"}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("mathematical failures exit 2") {
  CHECK(run({"trace", "--family", "cubic", "--alpha-range", "0.2:0.9"}).code == 2);
  CHECK(run({"verify", "--epsilon", "0.22", "--at-alpha", "2"}).code == 2);
  CHECK(run({"map42", "--epsilon", "2.0"}).code == 2);
  CHECK(run({"map42", "--epsilon", "1e-5"}).code == 2);
  CHECK(run({"find-eps0", "--bracket", "0.245:0.25"}).code == 2);
}

TEST_CASE("scan and find-eps0") {
  CHECK(run({"scan", "--epsilons", ""}).code == 1);
  CHECK(run({"scan", "--epsilons", ","}).code == 1);
  const Run one = run({"scan", "--epsilons", "0.22"});
  CHECK(one.code == 0);
  CHECK(one.out == "epsilon=0.22 shape=S-shaped turning_points=2\n");
  const Run table = run({"scan", "--epsilons", "0.23:0.25:0.01", "--alpha-range", "1e-3:200"});
  CHECK(table.out.find("epsilon=0.24 shape=S-shaped") != std::string::npos);
  CHECK(table.out.find("epsilon=0.25 shape=monotone") != std::string::npos);
  const Run e = run({"find-eps0", "--bracket", "0.22:0.25"});
  CHECK(e.code == 0);
  CHECK(e.out.find("epsilon0=0.24") == 0);
  CHECK(run({"find-eps0", "--bracket", "0.25:0.22"}).code == 1);
}

TEST_CASE("verify, limiting, map42, cubic") {
  const Run v = run({"verify", "--epsilon", "0.22"});
  CHECK(v.code == 0);
  CHECK(v.out.find("verified=pass") != std::string::npos);
  const Run k = run({"verify", "--family", "constant"});
  CHECK(k.code == 0);
  CHECK(k.out.find("no folds") != std::string::npos);

  const Run l = run({"limiting"});
  CHECK(l.code == 0);
  CHECK(l.out.rfind("eta0=16.839050 v0=1.518738", 0) == 0);
  CHECK(run({"limiting", "--n", "3"}).code == 1);

  const Run m = run({"map42", "--epsilon", "0.5"});
  CHECK(m.code == 0);
  CHECK(m.out.find("monotone=pass") != std::string::npos);

  const Run c = run({"cubic"});
  CHECK(c.code == 0);
  CHECK(c.out.find("shape=disconnected(2)") == 0);
  CHECK(c.out.find("segment 2") != std::string::npos);
  const Run w = run({"cubic", "--b", "1", "--c", "1.8"});
  CHECK(w.code == 0);
  CHECK(w.err.find("c <= 2b") != std::string::npos);
  CHECK(run({"cubic", "--epsilon", "1.0"}).code == 1);
}

TEST_CASE("json output") {
  const Run r = run({"trace", "--epsilon", "0.22", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["schema_version"] == "1");
  CHECK(j["command"] == "trace");
  CHECK(j["curve"]["turning_points"].size() == 2);
}

TEST_CASE("profile dump") {
  const fs::path p = scratch("profile.csv");
  CHECK(run({"trace", "--epsilon", "0.22", "--quiet", "--dump-profile", p.string(), "--profile-alpha", "3"}).code == 0);
  CHECK(slurp(p).rfind("r,u,du\n0,3,0\n", 0) == 0);
  CHECK(run({"trace", "--dump-profile", p.string()}).code == 1);
}

TEST_CASE("config file") {
  const fs::path cfg = scratch("run.cfg");
  {
    std::ofstream f(cfg);
    f << "# run configuration\nfamily = perturbed_gelfand\nepsilon=0.245   # monotone\nquiet=false\n";
  }
  CHECK(run({"trace", "--config", cfg.string()}).out.rfind("shape=monotone", 0) == 0);
  CHECK(run({"trace", "--config", cfg.string(), "--epsilon", "0.22"}).out.rfind("shape=S-shaped", 0) == 0);
  const auto expanded = expand_config({"trace", "--config", cfg.string()});
  CHECK(expanded[1] == "--family");
  {
    std::ofstream f(cfg);
    f << "colour=red\n";
  }
  CHECK(run({"trace", "--config", cfg.string()}).code == 1);
  {
    std::ofstream f(cfg);
    f << "not a pair\n";
  }
  CHECK(run({"trace", "--config", cfg.string()}).code == 1);
  CHECK(run({"trace", "--config", scratch("missing.cfg").string()}).code == 1);
}

TEST_CASE("outputs do not depend on the worker count") {
  const fs::path a = scratch("j1.json");
  const fs::path b = scratch("j4.json");
  run({"scan", "--epsilons", "0.2:0.25:0.01", "--format", "json", "--jobs", "1", "--out", a.string()});
  run({"scan", "--epsilons", "0.2:0.25:0.01", "--format", "json", "--jobs", "4", "--out", b.string()});
  CHECK_FALSE(slurp(a).empty());
  CHECK(slurp(a) == slurp(b));
}
