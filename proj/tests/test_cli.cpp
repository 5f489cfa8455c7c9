#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "wmr/cli.hpp"
#include "wmr/errors.hpp"
#include "wmr/io.hpp"
#include "wmr/plot.hpp"

using namespace wmr;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class Workspace {
 public:
  Workspace() : dir_(fs::temp_directory_path() / ("wmr_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(dir_);
  }
  ~Workspace() { fs::remove_all(dir_); }
  std::string file(const std::string& name, const std::string& content) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << content;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

 private:
  fs::path dir_;
};

std::string slurp(const std::string& p) { return io::read_file(p); }

}  // namespace

TEST_CASE("measure csv parsing") {
  DiscreteMeasure m = io::parse_measure_csv("atom,weight\n1,0.25\n-1, 0.5\n\n# note\n1,0.25\n");
  CHECK(same_measure(m, DiscreteMeasure({-1.0, 1.0}, {0.5, 0.5}), 0.0));
  m = io::parse_measure_csv("0.5,1\n");
  CHECK(same_measure(m, DiscreteMeasure::dirac(0.5), 0.0));
  m = io::parse_measure_csv("1e-1,0.3333333333\n2,0.3333333333\n3,0.3333333334\n");
  CHECK(m.size() == 3);
  CHECK_THROWS_AS(io::parse_measure_csv(""), ParseError);
  CHECK_THROWS_AS(io::parse_measure_csv("atom,weight\n"), ParseError);
  CHECK_THROWS_AS(io::parse_measure_csv("1,0.5\n2\n"), ParseError);
  CHECK_THROWS_AS(io::parse_measure_csv("1,0.5\nx,0.5\n"), ParseError);
  CHECK_THROWS_AS(io::parse_measure_csv("1,0.5,3\n"), ParseError);
  CHECK_THROWS_AS(io::parse_measure_csv("1,0.4\n2,0.4\n"), ParseError);
  CHECK_THROWS_AS(io::parse_measure_csv("1,-0.5\n2,1.5\n"), ParseError);
  CHECK_THROWS_AS(io::read_measure_csv("/nonexistent/measure.csv"), ParseError);
  CHECK(io::fmt(0.1) == "1.0000000000000001e-01");
}

TEST_CASE("cli order commands") {
  Workspace ws;
  const std::string d0 = ws.file("d0.csv", "0,1\n");
  const std::string pm1 = ws.file("pm1.csv", "atom,weight\n-1,0.5\n1,0.5\n");
  const std::string pm2 = ws.file("pm2.csv", "-2,0.5\n2,0.5\n");

  Run r = run({"check-order", d0, pm1});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("true\n", 0) == 0);
  r = run({"check-order", pm2, pm1});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("false\n", 0) == 0);

  r = run({"irreducible", d0, pm1});
  CHECK(r.code == 0);
  CHECK(r.out == "lo,hi\n-1.0000000000000000e+00,1.0000000000000000e+00\n");
  r = run({"irreducible", pm2, pm1});
  CHECK(r.code == 1);

  r = run({"potential", pm1, "--format", "json"});
  CHECK(r.code == 0);
  const io::Json j = io::Json::parse(r.out);
  CHECK(j["schema"] == 1);
  CHECK(j["samples"].size() == 4);
}

TEST_CASE("cli solver commands") {
  Workspace ws;
  const std::string pm1 = ws.file("pm1.csv", "-1,0.5\n1,0.5\n");
  const std::string pm2 = ws.file("pm2.csv", "-2,0.5\n2,0.5\n");
  const std::string four = ws.file("four.csv", "-3,0.25\n-1,0.25\n1,0.25\n3,0.25\n");

  Run r = run({"wmr", pm2, pm1, "--cost", "quadratic"});
  REQUIRE(r.code == 0);
  io::Json j = io::Json::parse(r.out);
  CHECK(j["schema"] == 1);
  CHECK(j["value"].get<double>() == doctest::Approx(1.0));
  CHECK(j["map"]["knots"][0][1].get<double>() == doctest::Approx(-1.0));

  r = run({"wmr", pm1, four, "--verify"});
  REQUIRE(r.code == 0);
  j = io::Json::parse(r.out);
  CHECK(j["value"].get<double>() == 0.0);
  CHECK(j["map"]["knots"][0][0] == j["map"]["knots"][0][1]);
  CHECK(j["verify"]["certificate"]["certified"] == true);
  CHECK(j["verify"]["slope1"]["ok"] == true);

  r = run({"value", pm2, pm1, "--cost", "power", "--rho", "4", "--verify-theta"});
  CHECK(r.code == 0);
  j = io::Json::parse(r.out);
  CHECK(j["theta_check"]["ok"] == true);

  r = run({"reverse", pm2, pm1});
  REQUIRE(r.code == 0);
  j = io::Json::parse(r.out);
  CHECK(j["nu_star"]["measure"]["atoms"][0].get<double>() == -2.0);

  r = run({"compose", pm2, four, "--format", "csv"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("source_atom,target_atom,mass\n", 0) == 0);
  r = run({"certify", pm2, four});
  CHECK(r.code == 0);
  CHECK(io::Json::parse(r.out)["certified"] == true);

  r = run({"stability", ws.file("d0.csv", "0,1\n"), pm1, "--rungs", "4", "--format", "csv"});
  CHECK(r.code == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 5);
  r = run({"stability", pm1, pm1, "--cost", "quartic"});
  CHECK(r.code == 1);
  r = run({"stability", pm1, pm1, "--cost", "quartic", "--ladder-rho", "4", "--ladder", "empirical",
           "--rungs", "3", "--seed", "9"});
  CHECK(r.code == 0);
}

TEST_CASE("cli exit codes") {
  Workspace ws;
  const std::string pm1 = ws.file("pm1.csv", "-1,0.5\n1,0.5\n");
  const std::string bad = ws.file("bad.csv", "-1,0.5\n1;0.5\n");
  CHECK(run({"check-order", bad, pm1}).code == 2);
  CHECK(run({"wmr", pm1, ws.path("missing.csv")}).code == 2);
  CHECK(run({"wmr", pm1}).code == 2);
  CHECK(run({"nonsense", pm1, pm1}).code == 2);
  CHECK(run({"wmr", pm1, pm1, "--cost", "cubic"}).code == 2);
  CHECK(run({"wmr", pm1, pm1, "--format", "svg"}).code == 2);
  CHECK(run({"wmr", pm1, pm1, "--cost", "power", "--rho", "0.5"}).code == 1);
  CHECK(run({"stability", pm1, pm1, "--ladder", "zigzag"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("cli output is byte-identical across runs") {
  Workspace ws;
  const std::string mu = ws.file("mu.csv", "-1.3,0.2\n0.1,0.3\n0.7,0.1\n2.2,0.4\n");
  const std::string nu = ws.file("nu.csv", "-0.5,0.25\n0.0,0.25\n0.6,0.3\n1.1,0.2\n");
  for (const std::vector<std::string>& cmd :
       {std::vector<std::string>{"wmr", mu, nu, "--verify"}, {"reverse", mu, nu},
        {"compose", mu, nu}, {"plot", mu, nu}, {"stability", mu, nu, "--ladder", "empirical"}}) {
    std::vector<std::string> a = cmd;
    a.insert(a.end(), {"--out", ws.path("a.out")});
    std::vector<std::string> b = cmd;
    b.insert(b.end(), {"--out", ws.path("b.out")});
    REQUIRE(run(a).code == 0);
    REQUIRE(run(b).code == 0);
    CHECK(slurp(ws.path("a.out")) == slurp(ws.path("b.out")));
    CHECK(!slurp(ws.path("a.out")).empty());
  }
}

TEST_CASE("plot partition") {
  const DiscreteMeasure pm2({-2.0, 2.0}, {0.5, 0.5});
  const DiscreteMeasure pm1({-1.0, 1.0}, {0.5, 0.5});
  const DiscreteMeasure four = DiscreteMeasure::uniform({-3.0, -1.0, 1.0, 3.0});

  std::vector<PlotPiece> p = plot_partition(weak_monotone_rearrangement(pm2, pm1), pm2);
  REQUIRE(p.size() == 1);
  CHECK(p[0].kind == PieceKind::Contractive);

  p = plot_partition(weak_monotone_rearrangement(pm2, four), pm2);
  REQUIRE(p.size() == 3);
  CHECK(p[0].kind == PieceKind::Martingale);
  CHECK(p[0].x0 == -2.0);
  CHECK(p[1].kind == PieceKind::Contractive);
  CHECK(p[2].kind == PieceKind::Martingale);
  CHECK(p[2].x0 == 2.0);

  // mu <=_c nu with a single component: one martingale region spanning mu.
  const DiscreteMeasure mu({-0.5, 0.5}, {0.5, 0.5});
  p = plot_partition(weak_monotone_rearrangement(mu, four), mu);
  REQUIRE(p.size() == 1);
  CHECK(p[0].kind == PieceKind::Martingale);
  CHECK(p[0].x0 == -0.5);
  CHECK(p[0].x1 == 0.5);

  const std::string svg = plot_svg(p, mu, weak_monotone_rearrangement(mu, four));
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("class=\"martingale\"") != std::string::npos);
}
