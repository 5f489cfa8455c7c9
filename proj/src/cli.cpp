#include "wmr/cli.hpp"

#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "wmr/errors.hpp"
#include "wmr/io.hpp"
#include "wmr/plot.hpp"

namespace wmr {

namespace {

using io::Json;

struct RunConfig {
  std::string command;
  std::vector<std::string> inputs;
  std::string cost = "quadratic";
  double rho = 2.0;
  std::optional<double> tol;
  bool verify = false;
  bool verify_theta = false;
  std::string out;
  std::string format;
  std::uint64_t seed = 1;
  std::string ladder = "shift";
  int rungs = 10;
  double ladder_rho = 2.0;
};

class Emitter {
 public:
  Emitter(const RunConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out) {}
  void operator()(const std::string& text) const {
    if (cfg_.out.empty()) {
      out_ << text;
    } else {
      io::write_file(cfg_.out, text);
    }
  }

 private:
  const RunConfig& cfg_;
  std::ostream& out_;
};

std::string format_or(const RunConfig& cfg, const std::string& fallback,
                      std::initializer_list<const char*> allowed) {
  const std::string f = cfg.format.empty() ? fallback : cfg.format;
  for (const char* a : allowed) {
    if (f == a) return f;
  }
  throw ParseError("format '" + f + "' is not available for " + cfg.command);
}

double verify_tol(const RunConfig& cfg, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  return cfg.tol ? *cfg.tol : 1e-7 * joint_scale(mu, nu);
}

Json theta_check(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const WeakSolution& base,
                 bool& ok) {
  const double scale = joint_scale(mu, nu);
  Json runs = Json::array();
  double worst = 0.0;
  for (const CostSpec& c : {CostSpec::quadratic(), CostSpec::quartic(), CostSpec::power(3.0)}) {
    const WeakSolution s = solve_weak_transport(mu, nu, c);
    const double w = wasserstein(s.pushforward, base.pushforward, 1.0);
    worst = std::max(worst, w);
    runs.push_back(Json{{"cost", c.name()}, {"value", s.value}, {"pushforward_w1", w}});
  }
  ok = worst <= 1e-6 * scale;
  return Json{{"ok", ok}, {"max_w1", worst}, {"tolerance", 1e-6 * scale}, {"runs", runs}};
}

int dispatch(const RunConfig& cfg, std::ostream& out) {
  const Emitter emit(cfg, out);
  std::vector<DiscreteMeasure> m;
  for (const std::string& p : cfg.inputs) m.push_back(io::read_measure_csv(p));
  const CostSpec cost = CostSpec::parse(cfg.cost, cfg.rho);
  const std::string& c = cfg.command;

  if (c == "potential") {
    const std::string f = format_or(cfg, "csv", {"csv", "json"});
    const PiecewiseLinearFn u = potential(m[0]);
    const double margin = std::max(1.0, m[0].diameter());
    std::vector<double> ys{m[0].min() - margin};
    for (double b : u.breakpoints()) ys.push_back(b);
    ys.push_back(m[0].max() + margin);
    if (f == "csv") {
      std::string s = "y,u\n";
      for (double y : ys) s += io::fmt(y) + "," + io::fmt(u(y)) + "\n";
      emit(s);
    } else {
      Json pts = Json::array();
      for (double y : ys) pts.push_back(Json::array({y, u(y)}));
      emit(io::dump(Json{{"schema", 1}, {"kind", "potential"}, {"samples", pts}}));
    }
    return 0;
  }
  if (c == "check-order") {
    const std::string f = format_or(cfg, "text", {"text", "json"});
    const double tol = cfg.tol ? *cfg.tol : order_tolerance(m[0], m[1]);
    const OrderVerdict v = convex_order_check(m[0], m[1], tol);
    if (f == "text") {
      emit(std::string(v.leq ? "true" : "false") + "\nwitness " + io::fmt(v.worst_point) +
           " excess " + io::fmt(v.worst_excess) + " mean_gap " + io::fmt(v.mean_gap) + "\n");
    } else {
      Json j = io::to_json(v);
      j["schema"] = 1;
      emit(io::dump(j));
    }
    return 0;
  }
  if (c == "irreducible") {
    const std::string f = format_or(cfg, "csv", {"csv", "json"});
    const double tol = cfg.tol ? *cfg.tol : order_tolerance(m[0], m[1]);
    if (!convex_order_leq(m[0], m[1], tol)) {
      throw OrderError("first measure is not below the second in convex order");
    }
    const std::vector<Interval> iv = irreducible_components(m[0], m[1], tol);
    if (f == "csv") {
      std::string s = "lo,hi\n";
      for (const Interval& I : iv) s += io::fmt(I.lo) + "," + io::fmt(I.hi) + "\n";
      emit(s);
    } else {
      emit(io::dump(Json{{"schema", 1}, {"kind", "irreducible"}, {"intervals", io::to_json(iv)}}));
    }
    return 0;
  }
  if (c == "wmr" || c == "value") {
    format_or(cfg, "json", {"json"});
    const WeakSolution s = solve_weak_transport(m[0], m[1], cost);
    Json doc = c == "wmr" ? io::solution_document(s)
                          : Json{{"schema", 1},
                                 {"kind", "value"},
                                 {"cost", Json{{"name", cost.name()}, {"rho", cost.rho()}}},
                                 {"value", s.value}};
    int code = 0;
    if (cfg.verify) {
      const double tol = verify_tol(cfg, m[0], m[1]);
      const Coupling pi = compose_with_map(m[0], s.map, build_martingale_coupling(s.pushforward, m[1]));
      const Slope1Report s1 = verify_slope1_characterization(s, m[0], m[1], tol);
      const CertificateReport cert = optimality_certificate(pi, m[0], m[1], cost, tol);
      doc["verify"] = Json{{"admissible", io::to_json(s1.admissible)},
                           {"slope1", io::to_json(s1)},
                           {"certificate", io::to_json(cert)}};
      if (!s1.ok() || !cert.certified) code = 1;
    }
    if (cfg.verify_theta) {
      bool ok = false;
      doc["theta_check"] = theta_check(m[0], m[1], s, ok);
      if (!ok) code = 1;
    }
    emit(io::dump(doc));
    return code;
  }
  if (c == "reverse") {
    format_or(cfg, "json", {"json"});
    emit(io::dump(io::reverse_document(reverse_optimizer(m[0], m[1], cost))));
    return 0;
  }
  if (c == "compose" || c == "certify") {
    const WeakSolution s = solve_weak_transport(m[0], m[1], cost);
    const Coupling pi = compose_with_map(m[0], s.map, build_martingale_coupling(s.pushforward, m[1]));
    if (c == "compose") {
      const std::string f = format_or(cfg, "json", {"json", "csv"});
      emit(f == "csv" ? io::coupling_csv(pi) : io::dump(io::coupling_document(pi)));
      return 0;
    }
    format_or(cfg, "json", {"json"});
    const CertificateReport cert = optimality_certificate(pi, m[0], m[1], cost, verify_tol(cfg, m[0], m[1]));
    Json j = io::to_json(cert);
    j["schema"] = 1;
    emit(io::dump(j));
    return cert.certified ? 0 : 1;
  }
  if (c == "stability") {
    const std::string f = format_or(cfg, "json", {"json", "csv"});
    if (cfg.rungs < 1) throw ParseError("--rungs must be positive");
    std::vector<double> steps;
    for (int k = 1; k <= cfg.rungs; ++k) {
      if (cfg.ladder == "shift") steps.push_back(1.0 / k);
      else if (cfg.ladder == "empirical") steps.push_back(std::ldexp(1.0, k));
      else if (cfg.ladder == "quantize") steps.push_back(std::ldexp(1.0, -k));
      else throw ParseError("unknown ladder '" + cfg.ladder + "'");
    }
    const PerturbationLadder ladder =
        cfg.ladder == "shift"       ? PerturbationLadder::shift(m[0], m[1], steps, cfg.ladder_rho)
        : cfg.ladder == "empirical" ? PerturbationLadder::empirical(m[0], m[1], steps, cfg.seed,
                                                                    cfg.ladder_rho)
                                    : PerturbationLadder::quantized(m[0], m[1], steps, cfg.ladder_rho);
    const StabilityReport r = run_stability_experiment(ladder, cost);
    emit(f == "csv" ? io::stability_csv(r) : io::dump(io::stability_document(r)));
    return 0;
  }
  if (c == "plot") {
    const std::string f = format_or(cfg, "svg", {"svg", "csv"});
    const WeakSolution s = solve_weak_transport(m[0], m[1], cost);
    const std::vector<PlotPiece> pieces = plot_partition(s, m[0]);
    if (f == "csv") {
      emit(plot_csv(pieces));
    } else {
      emit(plot_svg(pieces, m[0], s));
      if (!cfg.out.empty()) io::write_file(cfg.out + ".csv", plot_csv(pieces));
    }
    return 0;
  }
  throw ParseError("unknown command '" + c + "'");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weak monotone rearrangement between finitely supported measures on the line", "wmr"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub, int n_inputs) {
    sub->add_option("inputs", cfg.inputs, "measure CSV files")->required()->expected(n_inputs);
    sub->add_option("--out", cfg.out, "write output to PATH");
    sub->add_option("--format", cfg.format, "json, csv, svg or text");
    sub->add_option("--tol", cfg.tol, "tolerance override");
  };
  auto costs = [&](CLI::App* sub) {
    sub->add_option("--cost", cfg.cost, "quadratic, quartic or power")
        ->check(CLI::IsMember({"quadratic", "quartic", "power"}));
    sub->add_option("--rho", cfg.rho, "exponent of the power cost");
  };

  common(app.add_subcommand("potential", "potential function samples"), 1);
  common(app.add_subcommand("check-order", "convex order verdict"), 2);
  common(app.add_subcommand("irreducible", "irreducible intervals"), 2);
  for (const char* name : {"wmr", "value"}) {
    CLI::App* sub = app.add_subcommand(name, std::string(name) == "wmr" ? "solve for the rearrangement"
                                                                       : "optimal value");
    common(sub, 2);
    costs(sub);
    sub->add_flag("--verify", cfg.verify, "embed admissibility, slope-1 and certificate reports");
    sub->add_flag("--verify-theta", cfg.verify_theta, "compare pushforwards across costs");
  }
  for (const char* name : {"reverse", "compose", "certify", "plot"}) {
    CLI::App* sub = app.add_subcommand(name, name);
    common(sub, 2);
    costs(sub);
  }
  CLI::App* stab = app.add_subcommand("stability", "perturbation ladder experiment");
  common(stab, 2);
  costs(stab);
  stab->add_option("--ladder", cfg.ladder, "shift, empirical or quantize");
  stab->add_option("--rungs", cfg.rungs, "ladder length");
  stab->add_option("--ladder-rho", cfg.ladder_rho, "moment order of the ladder");
  stab->add_option("--seed", cfg.seed, "sampling seed");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "wmr: " << e.what() << "\n";
    return 2;
  }
  for (CLI::App* sub : app.get_subcommands()) cfg.command = sub->get_name();

  try {
    return dispatch(cfg, out);
  } catch (const ParseError& e) {
    err << "wmr: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    err << "wmr: solver failed: " << e.what() << " (kkt residual " << e.residual() << ")\n";
    return 1;
  } catch (const Error& e) {
    err << "wmr: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace wmr
