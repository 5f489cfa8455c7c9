#include "wmr/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "wmr/errors.hpp"

namespace wmr::io {

namespace {

bool parse_number(const std::string& s, double& out) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return false;
  const std::string t = s.substr(b, e - b + 1);
  char* end = nullptr;
  errno = 0;
  out = std::strtod(t.c_str(), &end);
  return errno == 0 && end == t.c_str() + t.size();
}

}  // namespace

DiscreteMeasure parse_measure_csv(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> atoms;
  std::vector<double> weights;
  int lineno = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const std::size_t comma = line.find(',');
    double a = 0.0;
    double w = 0.0;
    const bool ok = comma != std::string::npos && line.find(',', comma + 1) == std::string::npos &&
                    parse_number(line.substr(0, comma), a) &&
                    parse_number(line.substr(comma + 1), w);
    if (!ok) {
      if (!seen_data && comma != std::string::npos) {
        seen_data = true;  // header
        continue;
      }
      throw ParseError(origin + ":" + std::to_string(lineno) + ": expected 'atom,weight', got '" +
                       line + "'");
    }
    seen_data = true;
    atoms.push_back(a);
    weights.push_back(w);
  }
  if (atoms.empty()) throw ParseError(origin + ": no atoms");
  try {
    return DiscreteMeasure(std::move(atoms), std::move(weights));
  } catch (const MeasureError& e) {
    throw ParseError(origin + ": " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot write '" + path + "'");
  f << content;
  if (!f) throw ParseError("write failed for '" + path + "'");
}

DiscreteMeasure read_measure_csv(const std::string& path) {
  return parse_measure_csv(read_file(path), path);
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

Json to_json(const DiscreteMeasure& m) {
  Json j;
  j["atoms"] = std::vector<double>(m.atoms().begin(), m.atoms().end());
  j["weights"] = std::vector<double>(m.weights().begin(), m.weights().end());
  return j;
}

Json to_json(const Interval& I) { return Json::array({I.lo, I.hi}); }

Json to_json(const std::vector<Interval>& v) {
  Json j = Json::array();
  for (const Interval& I : v) j.push_back(to_json(I));
  return j;
}

Json to_json(const MonotoneMap& map) {
  Json knots = Json::array();
  for (const Knot& k : map.knots()) knots.push_back(Json::array({k.x, k.t}));
  return Json{{"knots", knots}};
}

Json to_json(const OrderVerdict& v) {
  return Json{{"leq", v.leq},
              {"mean_gap", v.mean_gap},
              {"worst_point", v.worst_point},
              {"worst_excess", v.worst_excess}};
}

Json to_json(const AdmissibilityReport& r) {
  return Json{{"ok", r.ok()},
              {"increasing", r.increasing},
              {"lipschitz", r.lipschitz},
              {"ordered", r.ordered},
              {"worst_decrease", r.worst_decrease},
              {"worst_stretch", r.worst_stretch},
              {"order", to_json(r.order)},
              {"messages", r.messages}};
}

Json to_json(const Slope1Report& r) {
  Json v = Json::array();
  for (const SlopeViolation& s : r.violations) {
    v.push_back(Json{{"index", s.index}, {"dx", s.dx}, {"dt", s.dt}, {"component", to_json(s.component)}});
  }
  return Json{{"ok", r.ok()},
              {"admissible", to_json(r.admissible)},
              {"irreducibles", to_json(r.irreducibles)},
              {"violations", v}};
}

Json to_json(const CertificateReport& r) {
  return Json{{"certified", r.certified},
              {"map_gap", r.map_gap},
              {"admissible", r.admissible},
              {"martingale_defect", r.martingale_defect},
              {"cost", r.cost},
              {"solver_value", r.solver_value},
              {"messages", r.messages}};
}

Json solution_document(const WeakSolution& s) {
  Json j;
  j["schema"] = 1;
  j["kind"] = "weak_solution";
  j["cost"] = Json{{"name", s.cost.name()}, {"rho", s.cost.rho()}};
  j["value"] = s.value;
  j["kkt_residual"] = s.kkt_residual;
  j["unique"] = s.unique;
  j["iterations"] = s.iterations;
  j["map"] = to_json(s.map);
  j["pushforward"] = to_json(s.pushforward);
  j["irreducibles"] = to_json(s.irreducibles);
  return j;
}

Json reverse_document(const ReverseSolution& r) {
  Json j = solution_document(r.forward);
  j["kind"] = "reverse_solution";
  j["nu_star"] = Json{{"measure", to_json(r.nu_star)},
                      {"tilde_map", to_json(r.tilde_map)},
                      {"irreducibles_mu_nustar", to_json(r.irreducibles_mu_nustar)},
                      {"reverse_value", r.reverse_value}};
  return j;
}

Json coupling_document(const Coupling& c) {
  Json e = Json::array();
  for (const CouplingEntry& x : c.entries) {
    e.push_back(Json::array({c.source.atom(x.source), c.target.atom(x.target), x.mass}));
  }
  return Json{{"schema", 1},
              {"kind", "coupling"},
              {"source", to_json(c.source)},
              {"target", to_json(c.target)},
              {"entries", e}};
}

Json stability_document(const StabilityReport& r) {
  Json rungs = Json::array();
  for (const RungReport& g : r.rungs) {
    rungs.push_back(Json{{"k", g.k},
                         {"step", g.step},
                         {"value", g.value},
                         {"value_gap", g.value_gap},
                         {"optimizer_gap_w1", g.optimizer_gap},
                         {"map_sup_gap", g.map_sup_gap},
                         {"map_gaps", g.map_gaps}});
  }
  return Json{{"schema", 1},
              {"kind", "stability"},
              {"base_value", r.base_value},
              {"eps_grid", r.eps_grid},
              {"quantile_identification", r.quantile_identification},
              {"rungs", rungs}};
}

std::string coupling_csv(const Coupling& c) {
  std::string s = "source_atom,target_atom,mass\n";
  for (const CouplingEntry& x : c.entries) {
    s += fmt(c.source.atom(x.source)) + "," + fmt(c.target.atom(x.target)) + "," + fmt(x.mass) + "\n";
  }
  return s;
}

std::string stability_csv(const StabilityReport& r) {
  std::string s = "k,value_gap,optimizer_gap_W1";
  for (double e : r.eps_grid) {
    char buf[32];
    std::snprintf(buf, sizeof buf, ",map_gap@%g", e);
    s += buf;
  }
  s += ",map_sup_gap\n";
  for (const RungReport& g : r.rungs) {
    s += std::to_string(g.k) + "," + fmt(g.value_gap) + "," + fmt(g.optimizer_gap);
    for (double m : g.map_gaps) s += "," + fmt(m);
    s += "," + fmt(g.map_sup_gap) + "\n";
  }
  return s;
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace wmr::io
