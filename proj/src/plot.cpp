#include "wmr/plot.hpp"

#include <algorithm>
#include <cstdio>

namespace wmr {

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

std::string px(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

}  // namespace

const char* piece_name(PieceKind k) {
  return k == PieceKind::Martingale ? "martingale" : "contractive";
}

std::vector<PlotPiece> plot_partition(const WeakSolution& sol, const DiscreteMeasure& mu) {
  const double tol = 1e-9 * std::max(1.0, mu.diameter());
  // component index of each atom's image, -1 on the fixed part
  std::vector<int> comp(mu.size(), -1);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t c = 0; c < sol.irreducibles.size(); ++c) {
      if (sol.irreducibles[c].contains(sol.images[i], tol)) comp[i] = static_cast<int>(c);
    }
  }
  std::vector<PlotPiece> out;
  std::size_t i = 0;
  while (i < mu.size()) {
    std::size_t j = i;
    if (comp[i] >= 0) {
      while (j + 1 < mu.size() && comp[j + 1] == comp[i]) ++j;
      out.push_back({PieceKind::Martingale, mu.atom(i), sol.images[i], mu.atom(j), sol.images[j]});
    }
    if (j + 1 < mu.size()) {
      out.push_back({PieceKind::Contractive, mu.atom(j), sol.images[j], mu.atom(j + 1),
                     sol.images[j + 1]});
    }
    i = j + 1;
  }
  if (mu.size() == 1 && out.empty()) {
    out.push_back({PieceKind::Contractive, mu.atom(0), sol.images[0], mu.atom(0), sol.images[0]});
  }
  return out;
}

std::string plot_csv(const std::vector<PlotPiece>& pieces) {
  std::string s = "kind,x0,t0,x1,t1\n";
  for (const PlotPiece& p : pieces) {
    s += std::string(piece_name(p.kind)) + "," + num(p.x0) + "," + num(p.t0) + "," + num(p.x1) +
         "," + num(p.t1) + "\n";
  }
  return s;
}

std::string plot_svg(const std::vector<PlotPiece>& pieces, const DiscreteMeasure& mu,
                     const WeakSolution& sol) {
  const double W = 480;
  const double H = 480;
  const double pad = 40;
  double xlo = mu.min();
  double xhi = mu.max();
  double tlo = *std::min_element(sol.images.begin(), sol.images.end());
  double thi = *std::max_element(sol.images.begin(), sol.images.end());
  const double lo = std::min(xlo, tlo);
  const double hi = std::max(xhi, thi);
  const double span = hi > lo ? hi - lo : 1.0;
  auto sx = [&](double x) { return pad + (x - lo) / span * (W - 2 * pad); };
  auto sy = [&](double t) { return H - pad - (t - lo) / span * (H - 2 * pad); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(W) + "\" height=\"" + px(H) +
       "\" viewBox=\"0 0 " + px(W) + " " + px(H) + "\">\n";
  s += "<style>.martingale{stroke:#7b3fa0;fill:#7b3fa0;stroke-width:4}"
       ".contractive{stroke:#1f5fbf;fill:#1f5fbf;stroke-width:2}"
       ".axis{stroke:#999;stroke-width:1;stroke-dasharray:4 4}</style>\n";
  s += "<line class=\"axis\" x1=\"" + px(sx(lo)) + "\" y1=\"" + px(sy(lo)) + "\" x2=\"" + px(sx(hi)) +
       "\" y2=\"" + px(sy(hi)) + "\"/>\n";
  for (const PlotPiece& p : pieces) {
    const char* cls = piece_name(p.kind);
    if (p.x0 == p.x1) {
      s += "<circle class=\"" + std::string(cls) + "\" cx=\"" + px(sx(p.x0)) + "\" cy=\"" +
           px(sy(p.t0)) + "\" r=\"5\"/>\n";
    } else {
      s += "<polyline class=\"" + std::string(cls) + "\" fill=\"none\" points=\"" + px(sx(p.x0)) +
           "," + px(sy(p.t0)) + " " + px(sx(p.x1)) + "," + px(sy(p.t1)) + "\"/>\n";
    }
  }
  for (std::size_t i = 0; i < mu.size(); ++i) {
    s += "<circle cx=\"" + px(sx(mu.atom(i))) + "\" cy=\"" + px(sy(sol.images[i])) +
         "\" r=\"2\" fill=\"#000\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace wmr
