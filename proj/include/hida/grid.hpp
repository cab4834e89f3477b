#pragma once

#include <cstddef>
#include <vector>

#include "json.hpp"

namespace hida {

/// Sorted sample points in r (or x, or t) with the recipe that produced them.
struct Grid {
  std::vector<double> points;

  double min() const { return points.front(); }
  double max() const { return points.back(); }
  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  nlohmann::json describe() const;
};

Grid linear_grid(double lo, double hi, std::size_t n);
Grid geometric_grid(double lo, double hi, std::size_t n);

/// {0} plus 20 linear points on (0, 1] plus `n_geom` geometric points on
/// [1e-6, r_max]. Spans the U0 infimum region and the asymptotic regime.
Grid default_r_grid(double r_max = 1e8, std::size_t n_geom = 400);

/// Inserts a midpoint between every adjacent pair (geometric between positive
/// points, arithmetic next to zero).
Grid refine(const Grid& g);

/// Points with lo <= p <= hi.
Grid clip(const Grid& g, double lo, double hi);

Grid merge(const Grid& a, const Grid& b);

/// "default", [points...], or {"kind": "linear"|"geometric"|"default", ...}.
Grid grid_from_json(const nlohmann::json& j);

}  // namespace hida
