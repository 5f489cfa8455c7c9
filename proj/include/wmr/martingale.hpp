#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "wmr/cost.hpp"
#include "wmr/measures.hpp"
#include "wmr/monotone_map.hpp"

namespace wmr {

struct CouplingEntry {
  std::size_t source = 0;  // atom index in source
  std::size_t target = 0;  // atom index in target
  double mass = 0.0;
  friend bool operator==(const CouplingEntry&, const CouplingEntry&) = default;
};

struct Coupling {
  DiscreteMeasure source;
  DiscreteMeasure target;
  std::vector<CouplingEntry> entries;  // sorted by (source, target)

  double row_mass(std::size_t i) const;
  double col_mass(std::size_t j) const;
  /// Largest deviation of row/column sums from the marginal weights.
  double marginal_defect() const;
  /// max_i |sum_j m_ij y_j / sum_j m_ij - x_i|
  double barycenter_defect() const;
};

/// A coupling with the barycenter property; same representation.
using MartingaleCoupling = Coupling;

/// Throws CouplingError unless row and column sums match within tol.
void validate_coupling(const Coupling& c, double tol = 1e-10);

MartingaleCoupling build_martingale_coupling(const DiscreteMeasure& eta, const DiscreteMeasure& nu);

/// mass(i, j) = p_i * (conditional of mg at map(x_i))(y_j)
Coupling compose_with_map(const DiscreteMeasure& mu, const MonotoneMap& map,
                          const MartingaleCoupling& mg);

struct ComponentPiece {
  Interval component;
  std::vector<CouplingEntry> entries;
  double mass = 0.0;
};

struct MartingaleDecomposition {
  std::vector<ComponentPiece> pieces;
  std::vector<CouplingEntry> fixed;             // diagonal mass on F
  std::vector<std::size_t> ambiguous_sources;   // on a boundary shared by two components
};

MartingaleDecomposition decompose_martingale(const MartingaleCoupling& mg);

/// Per source atom, the conditional mean of its targets.
MonotoneMap barycenter_map(const Coupling& pi);

struct CertificateReport {
  bool certified = false;
  double map_gap = 0.0;            // max_i |barycenter(x_i) - T(x_i)|
  bool admissible = false;
  double martingale_defect = 0.0;  // of the induced second-stage coupling
  double cost = 0.0;               // cost of pi
  double solver_value = 0.0;
  std::vector<std::string> messages;
};

CertificateReport optimality_certificate(const Coupling& pi, const DiscreteMeasure& mu,
                                         const DiscreteMeasure& nu, const CostSpec& cost,
                                         double tol);

/// int co(supp p) meets co(supp q), or the other way round.
bool supports_overlap(const DiscreteMeasure& p, const DiscreteMeasure& q);

/// Quantile splitting: p_a = (p below its a-quantile) + (q below its (1-a)-quantile),
/// q_a = p + q - p_a.
std::pair<DiscreteMeasure, DiscreteMeasure> competitor_curve(const DiscreteMeasure& p,
                                                             const DiscreteMeasure& q,
                                                             double alpha);

/// Conditional law of row i.
DiscreteMeasure row_conditional(const Coupling& c, std::size_t i);

}  // namespace wmr
