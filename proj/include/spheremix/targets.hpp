#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spheremix/sphere_geometry.hpp"
#include "spheremix/vmf.hpp"

namespace spheremix {

/// A continuous probability density on S^m.
struct TargetDensity {
  int m = 2;
  std::string name;
  SphereFunction f;
  bool declared_continuous = true;
  /// Set when the target is itself a vMF mixture (used by the CLI and tests).
  std::optional<VmfMixture> mixture;

  double operator()(std::span<const double> x) const { return f(x); }
};

/// int_{S^m} f d omega with a product rule (default orders for m <= 2, coarser above).
double sphere_integral(int m, const SphereFunction& f);

/// Wraps f after checking f >= 0 on the quadrature nodes and |int f - 1| <= tolerance.
/// Throws NonDensity otherwise.
TargetDensity make_target(int m, std::string name, SphereFunction f, double tolerance = 1e-6,
                          bool declared_continuous = true);

/// A vMF mixture used as a target density (always passes the density check).
TargetDensity mixture_target(const VmfMixture& mixture, std::string name = "mixture");

/// Deterministic well-spread unit vectors used by the built-in targets.
UnitVector suite_direction(int m, int index);

/// uniform, vmf2, vmf10, mix2, mix3, sqip.
const std::vector<std::string>& standard_target_names();

/// Built-in target by name; throws DomainError for unknown names.
/// sqip is f(x) proportional to exp(2 <x, e>^2), normalized by 1D quadrature.
TargetDensity standard_target(const std::string& name, int m);

}  // namespace spheremix
