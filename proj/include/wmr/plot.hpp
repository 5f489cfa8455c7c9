#pragma once

#include <string>
#include <vector>

#include "wmr/rearrangement.hpp"

namespace wmr {

enum class PieceKind { Martingale, Contractive };

/// A piece of the graph of T over [x0, x1]. Martingale pieces cover the atoms
/// sent into one irreducible interval; a single atom gives x0 == x1.
struct PlotPiece {
  PieceKind kind;
  double x0, t0, x1, t1;
};

std::vector<PlotPiece> plot_partition(const WeakSolution& sol, const DiscreteMeasure& mu);
std::string plot_csv(const std::vector<PlotPiece>& pieces);
std::string plot_svg(const std::vector<PlotPiece>& pieces, const DiscreteMeasure& mu,
                     const WeakSolution& sol);
const char* piece_name(PieceKind k);

}  // namespace wmr
