#include "hida/grid.hpp"

#include <algorithm>
#include <cmath>

#include "hida/errors.hpp"

namespace hida {

nlohmann::json Grid::describe() const {
  if (points.empty()) return {{"size", 0}};
  return {{"min", points.front()}, {"max", points.back()}, {"size", points.size()}};
}

Grid linear_grid(double lo, double hi, std::size_t n) {
  if (n < 2 || !(hi > lo)) throw ParameterError("linear_grid needs n >= 2 and hi > lo");
  Grid g;
  g.points.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    g.points[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  g.points.back() = hi;
  return g;
}

Grid geometric_grid(double lo, double hi, std::size_t n) {
  if (n < 2 || !(lo > 0.0) || !(hi > lo))
    throw ParameterError("geometric_grid needs n >= 2 and 0 < lo < hi");
  Grid g;
  g.points.resize(n);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i)
    g.points[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  g.points.front() = lo;
  g.points.back() = hi;
  return g;
}

static void normalize(std::vector<double>& p) {
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
}

Grid default_r_grid(double r_max, std::size_t n_geom) {
  Grid g = geometric_grid(1e-6, r_max, n_geom);
  g.points.push_back(0.0);
  for (int i = 1; i <= 20; ++i) g.points.push_back(i / 20.0);
  normalize(g.points);
  return clip(g, 0.0, r_max);
}

Grid refine(const Grid& g) {
  Grid out;
  out.points.reserve(2 * g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    out.points.push_back(g.points[i]);
    if (i + 1 < g.size()) {
      const double a = g.points[i], b = g.points[i + 1];
      out.points.push_back(a > 0.0 ? std::sqrt(a * b) : 0.5 * (a + b));
    }
  }
  normalize(out.points);
  return out;
}

Grid clip(const Grid& g, double lo, double hi) {
  Grid out;
  for (double p : g.points)
    if (p >= lo && p <= hi) out.points.push_back(p);
  return out;
}

Grid merge(const Grid& a, const Grid& b) {
  Grid out;
  out.points = a.points;
  out.points.insert(out.points.end(), b.points.begin(), b.points.end());
  normalize(out.points);
  return out;
}

}  // namespace hida

namespace hida {

Grid grid_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "default") return default_r_grid();
    throw SchemaError("grid: unknown grid name \"" + j.get<std::string>() + "\"");
  }
  if (j.is_number()) return Grid{{j.get<double>()}};
  if (j.is_array()) {
    Grid g;
    for (const auto& v : j) {
      if (!v.is_number()) throw SchemaError("grid: explicit points must be numbers");
      g.points.push_back(v.get<double>());
    }
    if (g.empty()) throw SchemaError("grid: explicit point list is empty");
    std::sort(g.points.begin(), g.points.end());
    return g;
  }
  if (!j.is_object() || !j.contains("kind")) throw SchemaError("grid: expected \"default\", an array or {\"kind\": ...}");
  const auto kind = j.at("kind").get<std::string>();
  try {
    if (kind == "default") return default_r_grid(j.value("r_max", 1e8), j.value("n_geom", 400));
    const double lo = j.at("min").get<double>(), hi = j.at("max").get<double>();
    const auto n = j.at("size").get<std::size_t>();
    if (kind == "linear") return linear_grid(lo, hi, n);
    if (kind == "geometric") return geometric_grid(lo, hi, n);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("grid: ") + e.what());
  } catch (const ParameterError& e) {
    throw SchemaError(std::string("grid: ") + e.what());
  }
  throw SchemaError("grid: unknown kind \"" + kind + "\"");
}

}  // namespace hida
