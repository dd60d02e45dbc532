#include "spheremix/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>

#include "spheremix/errors.hpp"

namespace spheremix {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre on [-1, 1]; cached because adaptive loops rebuild the same orders.
std::shared_ptr<const GaussRule> reference_gauss(int order) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const GaussRule>> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
  }
  auto rule = std::make_shared<GaussRule>();
  const int n = order;
  rule->nodes.resize(static_cast<std::size_t>(n));
  rule->weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule->nodes[static_cast<std::size_t>(i)] = -x;
    rule->nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule->weights[static_cast<std::size_t>(i)] = w;
    rule->weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) rule->nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  std::lock_guard lock(mutex);
  return cache.emplace(order, std::move(rule)).first->second;
}

void check_order(int order) {
  if (order < 1) throw DomainError("quadrature order must be >= 1");
}

// Gauss rule in theta over [a, b] with sin^p(theta) folded into the weights.
GaussRule sin_weighted_rule(int p, int order, double a, double b) {
  GaussRule r = gauss_legendre(order, a, b);
  if (p > 0) {
    for (std::size_t i = 0; i < r.nodes.size(); ++i) r.weights[i] *= std::pow(std::sin(r.nodes[i]), p);
  }
  return r;
}

// Expands per-angle 1D rules into a product rule on S^m.
SphereRule tensor_rule(int m, const std::vector<GaussRule>& factors, std::size_t max_points) {
  double total = 1.0;
  for (const auto& f : factors) total *= static_cast<double>(f.nodes.size());
  if (total > static_cast<double>(max_points)) {
    throw ResourceError("sphere rule with " + std::to_string(static_cast<long double>(total)) +
                        " points exceeds the cap of " + std::to_string(max_points));
  }
  const auto n = static_cast<std::size_t>(total);
  const auto dim = static_cast<std::size_t>(m);
  SphereRule rule;
  rule.m = m;
  rule.points.resize(n * (dim + 1));
  rule.weights.resize(n);
  std::vector<std::size_t> idx(dim, 0);
  std::vector<double> thetas(dim - 1);
  for (std::size_t i = 0; i < n; ++i) {
    double w = 1.0;
    for (std::size_t j = 0; j + 1 < dim; ++j) {
      thetas[j] = factors[j].nodes[idx[j]];
      w *= factors[j].weights[idx[j]];
    }
    const double phi = factors[dim - 1].nodes[idx[dim - 1]];
    w *= factors[dim - 1].weights[idx[dim - 1]];
    spherical_to_cartesian(m, thetas, phi, std::span<double>(rule.points).subspan(i * (dim + 1), dim + 1));
    rule.weights[i] = w;
    for (std::size_t j = dim; j-- > 0;) {
      if (++idx[j] < factors[j].nodes.size()) break;
      idx[j] = 0;
    }
  }
  return rule;
}

}  // namespace

GaussRule gauss_legendre(int order, double a, double b) {
  check_order(order);
  const auto ref = reference_gauss(order);
  GaussRule r;
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  r.nodes.resize(ref->nodes.size());
  r.weights.resize(ref->weights.size());
  for (std::size_t i = 0; i < ref->nodes.size(); ++i) {
    r.nodes[i] = mid + half * ref->nodes[i];
    r.weights[i] = half * ref->weights[i];
  }
  return r;
}

IntervalRule interval_rule(int m, int order) { return interval_rule(m, order, -1.0, 1.0); }

IntervalRule interval_rule(int m, int order, double t_lo, double t_hi) {
  if (m < 1) throw DomainError("interval_rule: m must be >= 1");
  check_order(order);
  if (!(t_lo >= -1.0 && t_hi <= 1.0 && t_lo < t_hi)) {
    throw DomainError("interval_rule: need -1 <= t_lo < t_hi <= 1");
  }
  const GaussRule g = sin_weighted_rule(m - 1, order, std::acos(t_hi), std::acos(t_lo));
  IntervalRule r;
  r.m = m;
  r.nodes.resize(g.nodes.size());
  r.weights = g.weights;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) r.nodes[i] = std::cos(g.nodes[i]);
  return r;
}

std::vector<int> default_sphere_orders(int m) {
  if (m < 1) throw DomainError("default_sphere_orders: m must be >= 1");
  if (m <= 2) {
    std::vector<int> orders(static_cast<std::size_t>(m), 128);
    orders.back() = 256;
    return orders;
  }
  std::vector<int> orders(static_cast<std::size_t>(m), 64);
  orders.front() = 128;
  orders.back() = 128;
  return orders;
}

SphereRule sphere_rule(int m, std::span<const int> orders, std::size_t max_points) {
  if (m < 1) throw DomainError("sphere_rule: m must be >= 1");
  if (orders.size() != static_cast<std::size_t>(m)) throw DomainError("sphere_rule: need one order per angle");
  std::vector<GaussRule> factors;
  for (int j = 0; j + 1 < m; ++j) {
    const int order = orders[static_cast<std::size_t>(j)];
    check_order(order);
    factors.push_back(sin_weighted_rule(m - 1 - j, order, 0.0, kPi));
  }
  const int n_phi = orders.back();
  check_order(n_phi);
  GaussRule trap;
  for (int i = 0; i < n_phi; ++i) {
    trap.nodes.push_back(2.0 * kPi * i / n_phi);
    trap.weights.push_back(2.0 * kPi / n_phi);
  }
  factors.push_back(std::move(trap));
  return tensor_rule(m, factors, max_points);
}

SphereRule block_rule(int m, const CoordinateBlock& block, std::span<const int> orders) {
  if (m < 1) throw DomainError("block_rule: m must be >= 1");
  if (orders.size() != static_cast<std::size_t>(m) || block.intervals.size() != static_cast<std::size_t>(m)) {
    throw DomainError("block_rule: need one order and one interval per angle");
  }
  std::vector<GaussRule> factors;
  for (int j = 0; j < m; ++j) {
    const auto& iv = block.intervals[static_cast<std::size_t>(j)];
    const int power = j + 1 < m ? m - 1 - j : 0;
    factors.push_back(sin_weighted_rule(power, orders[static_cast<std::size_t>(j)], iv.lo, iv.hi));
  }
  return tensor_rule(m, factors, kDefaultMaxRulePoints);
}

SupGrid sup_grid(int m, int resolution, std::size_t max_points) {
  if (m < 1) throw DomainError("sup_grid: m must be >= 1");
  if (resolution < 2) throw DomainError("sup_grid: resolution must be >= 2");
  SupGrid g;
  g.m = m;
  g.resolution = resolution;
  const auto dim = static_cast<std::size_t>(m) + 1;
  if (m == 1) {
    if (static_cast<std::size_t>(resolution) > max_points) throw ResourceError("sup_grid: too many points");
    g.kind = "circle";
    for (int i = 0; i < resolution; ++i) {
      const double phi = 2.0 * kPi * i / resolution;
      g.points.push_back(std::cos(phi));
      g.points.push_back(std::sin(phi));
    }
    g.mesh_norm = kPi / resolution;
    return g;
  }
  if (m == 2) {
    if (static_cast<std::size_t>(resolution) > max_points) throw ResourceError("sup_grid: too many points");
    g.kind = "fibonacci";
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    g.points.resize(static_cast<std::size_t>(resolution) * dim);
    for (int i = 0; i < resolution; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / resolution;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * i;
      auto p = std::span<double>(g.points).subspan(static_cast<std::size_t>(i) * dim, dim);
      p[0] = r * std::cos(phi);
      p[1] = r * std::sin(phi);
      p[2] = z;
    }
    g.mesh_norm = probe_mesh_norm(g, 4 * static_cast<std::size_t>(resolution));
    g.mesh_norm_empirical = true;
    return g;
  }
  // product grid: colatitudes include both poles, azimuth equispaced
  const int r = std::max(2, static_cast<int>(std::ceil(std::pow(resolution, 1.0 / m))));
  const double total = std::pow(static_cast<double>(r), m);
  if (total > static_cast<double>(max_points)) throw ResourceError("sup_grid: too many points");
  g.kind = "product";
  const double h_theta = kPi / (r - 1);
  const double h_phi = 2.0 * kPi / r;
  const auto n = static_cast<std::size_t>(total);
  g.points.resize(n * dim);
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  std::vector<double> thetas(static_cast<std::size_t>(m - 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j + 1 < m; ++j) thetas[static_cast<std::size_t>(j)] = h_theta * idx[static_cast<std::size_t>(j)];
    spherical_to_cartesian(m, thetas, h_phi * idx.back(), std::span<double>(g.points).subspan(i * dim, dim));
    for (std::size_t j = idx.size(); j-- > 0;) {
      if (++idx[j] < r) break;
      idx[j] = 0;
    }
  }
  // ds^2 <= sum_j d theta_j^2, so half-steps bound the covering radius
  g.mesh_norm = std::sqrt((m - 1) * 0.25 * h_theta * h_theta + 0.25 * h_phi * h_phi);
  return g;
}

namespace {

// Squared chord distances from p to its three nearest grid points (Fibonacci
// order: z descending, so the scan stops once |dz| alone is too large).
struct Nearest3 {
  double d2[3] = {4.0, 4.0, 4.0};
  std::size_t idx[3] = {0, 0, 0};
};

Nearest3 nearest3(const SupGrid& grid, const double* p) {
  const std::size_t n = grid.size();
  const double guess = std::clamp((1.0 - p[2]) * 0.5 * static_cast<double>(n) - 0.5, 0.0, static_cast<double>(n - 1));
  const auto start = static_cast<std::size_t>(guess);
  Nearest3 out;
  auto visit = [&](std::size_t i) {
    const auto x = grid.point(i);
    const double dx = x[0] - p[0];
    const double dy = x[1] - p[1];
    const double dz = x[2] - p[2];
    double d2 = dx * dx + dy * dy + dz * dz;
    std::size_t id = i;
    for (int k = 0; k < 3; ++k) {
      if (d2 < out.d2[k]) {
        std::swap(d2, out.d2[k]);
        std::swap(id, out.idx[k]);
      }
    }
    return dz * dz;
  };
  for (std::size_t i = start; i < n; ++i) {
    if (visit(i) > out.d2[2]) break;
  }
  for (std::size_t i = start; i-- > 0;) {
    if (visit(i) > out.d2[2]) break;
  }
  return out;
}

double chord_to_arc(double d2) { return 2.0 * std::asin(std::min(1.0, 0.5 * std::sqrt(d2))); }

}  // namespace

double probe_mesh_norm(const SupGrid& grid, std::size_t probe_count) {
  if (grid.m != 2) throw DomainError("probe_mesh_norm: only implemented for m = 2");
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> uz(-1.0, 1.0);
  std::uniform_real_distribution<double> uphi(0.0, 2.0 * kPi);
  double worst = 0.0;
  for (std::size_t q = 0; q < probe_count + 2; ++q) {
    double p[3];
    if (q < 2) {
      p[0] = 0.0;
      p[1] = 0.0;
      p[2] = q == 0 ? 1.0 : -1.0;
    } else {
      const double z = uz(rng);
      const double phi = uphi(rng);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      p[0] = r * std::cos(phi);
      p[1] = r * std::sin(phi);
      p[2] = z;
    }
    const Nearest3 near = nearest3(grid, p);
    worst = std::max(worst, chord_to_arc(near.d2[0]));
    // the covering radius is attained at Voronoi vertices: circumcenters of nearby triples
    const auto a = grid.point(near.idx[0]);
    const auto b = grid.point(near.idx[1]);
    const auto c = grid.point(near.idx[2]);
    const double u[3] = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
    const double v[3] = {c[0] - a[0], c[1] - a[1], c[2] - a[2]};
    double w[3] = {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
    const double norm = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
    if (!(norm > 0.0)) continue;
    const double sign = w[0] * p[0] + w[1] * p[1] + w[2] * p[2] < 0.0 ? -1.0 : 1.0;
    for (double& x : w) x *= sign / norm;
    worst = std::max(worst, chord_to_arc(nearest3(grid, w).d2[0]));
  }
  return worst;
}

}  // namespace spheremix
