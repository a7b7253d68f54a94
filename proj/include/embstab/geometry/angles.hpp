#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "embstab/embed/embedding.hpp"
#include "embstab/error.hpp"
#include "embstab/geometry/measures.hpp"
#include "embstab/graph/pair_sampling.hpp"

namespace embstab {

/// Spread of a node pair's angle across runs, grouped by graph distance.
struct CategoryDeviation {
  PairCategory category{};
  std::vector<double> pair_mad_degrees;  // one value per usable sampled pair
  double mean_mad_degrees = 0.0;
  std::size_t skipped = 0;  // pairs dropped because some run had a zero vector
};

struct AngleDeviationReport {
  CategoryDeviation one_hop;
  CategoryDeviation two_hop;
  CategoryDeviation distant;
};

namespace detail {

inline double angle_degrees(double cosine) {
  const double c = std::clamp(cosine, -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

inline CategoryDeviation category_deviation(const EmbeddingSet& set,
                                            const NodePairSample& sample) {
  CategoryDeviation out;
  out.category = sample.category;
  std::vector<double> angles(set.run_count());
  for (const auto& [u, v] : sample.pairs) {
    bool usable = true;
    for (std::size_t r = 0; r < set.run_count(); ++r) {
      const auto& z = set.runs[r].matrix;
      const double cu = z.row(static_cast<Index>(u)).norm();
      const double cv = z.row(static_cast<Index>(v)).norm();
      if (cu == 0.0 || cv == 0.0) {
        usable = false;
        break;
      }
      angles[r] = angle_degrees(z.row(static_cast<Index>(u))
                                    .dot(z.row(static_cast<Index>(v))) /
                                (cu * cv));
    }
    if (!usable) {
      ++out.skipped;
      continue;
    }
    double mean = 0.0;
    for (double a : angles) mean += a;
    mean /= static_cast<double>(angles.size());
    double mad = 0.0;
    for (double a : angles) mad += std::abs(a - mean);
    mad /= static_cast<double>(angles.size());
    out.pair_mad_degrees.push_back(mad);
  }
  if (!out.pair_mad_degrees.empty()) {
    double s = 0.0;
    for (double v : out.pair_mad_degrees) s += v;
    out.mean_mad_degrees = s / static_cast<double>(out.pair_mad_degrees.size());
  }
  return out;
}

}  // namespace detail

/// For every sampled node pair: the angle between the two nodes' raw vectors
/// in each run, then the mean absolute deviation of that angle across runs.
/// Needs no alignment, because angles within one embedding are invariant to
/// orthogonal transforms. Reported per distance category.
inline AngleDeviationReport angle_deviation(const EmbeddingSet& set,
                                            const PairSamples& samples) {
  if (set.run_count() < 2)
    throw InsufficientDataError("angle deviation needs at least two runs");
  AngleDeviationReport out;
  out.one_hop = detail::category_deviation(set, samples.one_hop);
  out.two_hop = detail::category_deviation(set, samples.two_hop);
  out.distant = detail::category_deviation(set, samples.distant);
  return out;
}

}  // namespace embstab
