#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "wmr/measures.hpp"

namespace wmr::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Atoms drawn from [lo, hi], weights k_i / sum k with k_i in 1..5.
inline DiscreteMeasure random_measure(Rng& rng, int n, double lo = -1.0, double hi = 1.0) {
  std::vector<double> atoms(static_cast<std::size_t>(n));
  std::vector<double> counts(static_cast<std::size_t>(n));
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    atoms[static_cast<std::size_t>(i)] = uniform(rng, lo, hi);
    counts[static_cast<std::size_t>(i)] = uniform_int(rng, 1, 5);
    total += counts[static_cast<std::size_t>(i)];
  }
  for (double& c : counts) c /= total;
  return DiscreteMeasure(std::move(atoms), std::move(counts));
}

/// Barycenters of a random consecutive partition of b's atoms; always <=_c b.
inline DiscreteMeasure random_coarsening(Rng& rng, const DiscreteMeasure& b) {
  std::vector<double> atoms;
  std::vector<double> masses;
  double mass = 0.0;
  double moment = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    mass += b.weight(i);
    moment += b.weight(i) * b.atom(i);
    if (i + 1 == b.size() || uniform_int(rng, 0, 2) == 0) {
      atoms.push_back(moment / mass);
      masses.push_back(mass);
      mass = moment = 0.0;
    }
  }
  return DiscreteMeasure(std::move(atoms), std::move(masses));
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace wmr::testing

namespace wmr::testing {

/// Increasing 1-Lipschitz images on the atoms of m with the given mean.
inline std::vector<double> random_admissible_images(Rng& rng, const DiscreteMeasure& m,
                                                    double target_mean) {
  std::vector<double> t(m.size(), 0.0);
  for (std::size_t i = 1; i < m.size(); ++i) {
    const double u = uniform_int(rng, 0, 3) == 0 ? 1.0 : uniform(rng, 0.0, 1.0);
    t[i] = t[i - 1] + u * (m.atom(i) - m.atom(i - 1));
  }
  double mean = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) mean += m.weight(i) * t[i];
  for (double& v : t) v += target_mean - mean;
  return t;
}

struct Preimage {
  DiscreteMeasure eta;
  std::vector<double> images;
};

/// Measure eta and increasing 1-Lipschitz images with image law nu, splitting
/// some atoms of nu. The mean of eta is target_mean.
inline Preimage random_preimage(Rng& rng, const DiscreteMeasure& nu, double target_mean) {
  std::vector<double> z;
  std::vector<double> w;
  std::vector<double> img;
  double d = 0.0;
  for (std::size_t j = 0; j < nu.size(); ++j) {
    d += uniform_int(rng, 0, 2) == 0 ? 0.0 : uniform(rng, 0.0, 0.5);
    const double y = nu.atom(j);
    if (uniform_int(rng, 0, 2) == 0) {
      const double split = uniform(rng, 0.2, 0.8);
      const double delta = uniform(rng, 0.05, 0.5);
      z.push_back(y + d);
      w.push_back(split * nu.weight(j));
      img.push_back(y);
      d += delta;
      z.push_back(y + d);
      w.push_back((1.0 - split) * nu.weight(j));
      img.push_back(y);
    } else {
      z.push_back(y + d);
      w.push_back(nu.weight(j));
      img.push_back(y);
    }
  }
  double mean = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) mean += w[k] * z[k];
  for (double& v : z) v += target_mean - mean;
  return {DiscreteMeasure(std::move(z), std::move(w)), std::move(img)};
}

}  // namespace wmr::testing
