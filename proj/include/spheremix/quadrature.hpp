#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "spheremix/sphere_geometry.hpp"

namespace spheremix {

/// Gauss-Legendre nodes/weights on [a, b].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int order, double a = -1.0, double b = 1.0);

/// Rule for  int g(t) (1 - t^2)^{(m-2)/2} dt  over [t_lo, t_hi] subset of [-1, 1].
///
/// Built from Gauss-Legendre in theta = arccos(t) with sin^{m-1}(theta)
/// folded into the weights, so the m = 1 endpoint singularity never appears.
struct IntervalRule {
  int m = 2;
  std::vector<double> nodes;    ///< t values
  std::vector<double> weights;  ///< positive

  std::size_t size() const { return nodes.size(); }

  template <typename G>
  double integrate(G&& g) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * g(nodes[i]);
    return s;
  }
};

IntervalRule interval_rule(int m, int order);
IntervalRule interval_rule(int m, int order, double t_lo, double t_hi);

/// Weighted point set on S^m: sum_j w_j f(p_j) approximates int_{S^m} f d omega.
struct SphereRule {
  int m = 2;
  std::vector<double> points;   ///< flat, (m+1) coordinates per point
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  std::span<const double> point(std::size_t i) const {
    const auto d = static_cast<std::size_t>(m) + 1;
    return std::span<const double>(points).subspan(i * d, d);
  }

  template <typename F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += weights[i] * f(point(i));
    return s;
  }
};

inline constexpr std::size_t kDefaultMaxRulePoints = 50'000'000;

/// 128 Gauss nodes in theta_1 and 256 trapezoid nodes in azimuth; for m >= 3 the
/// inner colatitudes get 64 nodes and azimuth 128.
std::vector<int> default_sphere_orders(int m);

/// Product rule: Gauss-Legendre in each colatitude (sin powers folded into the
/// weights) and the trapezoid rule in azimuth. `orders` has one entry per angle.
SphereRule sphere_rule(int m, std::span<const int> orders, std::size_t max_points = kDefaultMaxRulePoints);

/// Same product construction restricted to a coordinate block (Gauss-Legendre in
/// every angle, including azimuth, since the block is not periodic).
SphereRule block_rule(int m, const CoordinateBlock& block, std::span<const int> orders);

/// Finite evaluation set for sup-norm estimates.
struct SupGrid {
  int m = 2;
  std::vector<double> points;  ///< flat, (m+1) per point
  std::string kind;            ///< "circle", "fibonacci" or "product"
  int resolution = 0;          ///< requested point count
  double mesh_norm = 0.0;      ///< bound on max distance from S^m to the grid
  bool mesh_norm_empirical = false;

  std::size_t size() const { return points.size() / (static_cast<std::size_t>(m) + 1); }
  std::span<const double> point(std::size_t i) const {
    const auto d = static_cast<std::size_t>(m) + 1;
    return std::span<const double>(points).subspan(i * d, d);
  }
};

inline constexpr std::size_t kDefaultMaxGridPoints = 20'000'000;

/// m = 1: equispaced circle; m = 2: Fibonacci spiral; m >= 3: product angle grid
/// including the poles. Throws DomainError for resolution < 2 and ResourceError
/// above `max_points`.
SupGrid sup_grid(int m, int resolution, std::size_t max_points = kDefaultMaxGridPoints);

/// Largest distance from a probe point to its nearest grid point (m = 2 only;
/// points must be sorted by descending last coordinate, as the Fibonacci grid is).
double probe_mesh_norm(const SupGrid& grid, std::size_t probe_count);

}  // namespace spheremix
