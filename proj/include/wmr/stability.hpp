#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "wmr/cost.hpp"
#include "wmr/measures.hpp"

namespace wmr {

enum class LadderKind { Shift, Empirical, Quantize };

/// Sequence of perturbed pairs (mu^k, nu^k), k = 1..steps.size().
/// Shift moves nu by steps[k-1]; Empirical samples round(steps[k-1]) points
/// from both mu and nu; Quantize coarsens both with width steps[k-1].
struct PerturbationLadder {
  DiscreteMeasure mu;
  DiscreteMeasure nu;
  LadderKind kind = LadderKind::Shift;
  std::vector<double> steps;
  std::uint64_t seed = 0;
  double rho = 2.0;

  std::size_t length() const noexcept { return steps.size(); }
  std::pair<DiscreteMeasure, DiscreteMeasure> rung(std::size_t k) const;  // k >= 1

  static PerturbationLadder shift(DiscreteMeasure mu, DiscreteMeasure nu, std::vector<double> h,
                                  double rho = 2.0);
  static PerturbationLadder empirical(DiscreteMeasure mu, DiscreteMeasure nu,
                                      std::vector<double> sizes, std::uint64_t seed,
                                      double rho = 2.0);
  static PerturbationLadder quantized(DiscreteMeasure mu, DiscreteMeasure nu,
                                      std::vector<double> deltas, double rho = 2.0);
};

struct RungReport {
  std::size_t k = 0;
  double step = 0.0;
  double value = 0.0;
  double value_gap = 0.0;
  double optimizer_gap = 0.0;        // W1(eta^k, eta)
  double map_sup_gap = 0.0;          // sup over quantile levels of |T^k - T|
  std::vector<double> map_gaps;      // Lebesgue measure of {|T^k - T| > eps}, per eps
};

struct StabilityReport {
  double base_value = 0.0;
  std::vector<double> eps_grid;
  std::vector<RungReport> rungs;
  bool quantile_identification = false;   // maps compared through quantile levels
};

/// Solves every rung (concurrently) and reports gaps against the base pair.
/// Throws HypothesisError if the cost grows faster than |x|^rho.
StabilityReport run_stability_experiment(const PerturbationLadder& ladder, const CostSpec& cost,
                                         std::vector<double> eps_grid = {1e-1, 1e-2, 1e-3});

/// Lebesgue measure of {s in (0,1) : |f(q_a(s)) - g(q_b(s))| > eps} and the sup of that gap.
std::pair<double, double> quantile_map_gap(const DiscreteMeasure& a, const std::vector<double>& fa,
                                           const DiscreteMeasure& b, const std::vector<double>& gb,
                                           double eps);

/// eta^k = R^k(eta) with R^k(x) the conditional mean of nu^k given x, through a
/// martingale coupling of (eta, nu) and the quantile coupling of (nu, nu^k).
DiscreteMeasure eta_transfer(const DiscreteMeasure& eta, const DiscreteMeasure& nu,
                             const DiscreteMeasure& nu_k);
/// The transfer map itself, one image per atom of eta.
std::vector<double> eta_transfer_images(const DiscreteMeasure& eta, const DiscreteMeasure& nu,
                                        const DiscreteMeasure& nu_k);

struct Truncation {
  std::vector<double> sub_masses;   // aligned with the atoms of the input
  DiscreteMeasure renormalized;
};

/// Removes total mass eps from the two tails so that the renormalized mean is unchanged.
Truncation truncate_mean_preserving(const DiscreteMeasure& eta, double eps);

/// Barycenters of k equal cells anchored at the smallest atom (last cell closed).
DiscreteMeasure finite_support_approx(const DiscreteMeasure& eta, int k);

}  // namespace wmr
