#include "spheremix/targets.hpp"

#include <cmath>

#include "spheremix/errors.hpp"
#include "spheremix/quadrature.hpp"
#include "spheremix/special_functions.hpp"

namespace spheremix {

namespace {

std::vector<int> check_orders(int m) {
  if (m <= 2) return default_sphere_orders(m);
  std::vector<int> orders(static_cast<std::size_t>(m), m == 3 ? 48 : 24);
  orders.back() = m == 3 ? 96 : 48;
  return orders;
}

VmfMixture suite_mixture(int m, std::vector<double> kappas, std::vector<double> weights) {
  std::vector<VmfComponent> comps;
  for (std::size_t h = 0; h < kappas.size(); ++h) {
    comps.push_back({suite_direction(m, static_cast<int>(h)), kappas[h]});
  }
  return VmfMixture(m, std::move(comps), std::move(weights));
}

}  // namespace

double sphere_integral(int m, const SphereFunction& f) {
  const auto orders = check_orders(m);
  return sphere_rule(m, orders).integrate(f);
}

TargetDensity make_target(int m, std::string name, SphereFunction f, double tolerance, bool declared_continuous) {
  if (m < 1) throw DomainError("make_target: m must be >= 1");
  const auto orders = check_orders(m);
  const SphereRule rule = sphere_rule(m, orders);
  double total = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = f(rule.point(i));
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw NonDensity("target '" + name + "' is negative or non-finite at a quadrature node");
    }
    total += rule.weights[i] * v;
  }
  if (!(std::abs(total - 1.0) <= tolerance)) {
    throw NonDensity("target '" + name + "' integrates to " + std::to_string(total) + " over S^" +
                     std::to_string(m) + ", not 1");
  }
  return TargetDensity{m, std::move(name), std::move(f), declared_continuous, std::nullopt};
}

TargetDensity mixture_target(const VmfMixture& mixture, std::string name) {
  SphereFunction f{[mixture](std::span<const double> x) { return mixture.density(x); }, true};
  return TargetDensity{mixture.m(), std::move(name), std::move(f), true, mixture};
}

UnitVector suite_direction(int m, int index) {
  std::vector<double> c(static_cast<std::size_t>(m) + 1);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::cos(2.3 * index + 0.9 * static_cast<double>(i) + 0.4);
  return UnitVector(std::move(c));
}

const std::vector<std::string>& standard_target_names() {
  static const std::vector<std::string> names = {"uniform", "vmf2", "vmf10", "mix2", "mix3", "sqip"};
  return names;
}

TargetDensity standard_target(const std::string& name, int m) {
  if (m < 1) throw DomainError("standard_target: m must be >= 1");
  if (name == "uniform") {
    const double value = 1.0 / surface_measure(m);
    return TargetDensity{m, name, SphereFunction{[value](std::span<const double>) { return value; }, true}, true,
                         std::nullopt};
  }
  if (name == "vmf2") return mixture_target(suite_mixture(m, {2.0}, {1.0}), name);
  if (name == "vmf10") return mixture_target(suite_mixture(m, {10.0}, {1.0}), name);
  if (name == "mix2") return mixture_target(suite_mixture(m, {5.0, 5.0}, {0.6, 0.4}), name);
  if (name == "mix3") return mixture_target(suite_mixture(m, {4.0, 6.0, 8.0}, {0.5, 0.3, 0.2}), name);
  if (name == "sqip") {
    // normalizer: omega_{m-1} int exp(2 t^2) (1 - t^2)^{(m-2)/2} dt
    const IntervalRule rule = interval_rule(m, 256);
    const double z = surface_measure(m - 1) * rule.integrate([](double t) { return std::exp(2.0 * t * t); });
    const UnitVector e = suite_direction(m, 0);
    const double log_z = std::log(z);
    SphereFunction f{[e, log_z](std::span<const double> x) {
                       const double t = dot(x, e);
                       return std::exp(2.0 * t * t - log_z);
                     },
                     true};
    return TargetDensity{m, name, std::move(f), true, std::nullopt};
  }
  throw DomainError("unknown target '" + name + "'");
}

}  // namespace spheremix
