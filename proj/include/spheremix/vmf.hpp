#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spheremix/sphere_geometry.hpp"
#include "spheremix/zonal_kernel.hpp"

namespace spheremix {

struct VmfComponent {
  UnitVector mu;
  double kappa;
};

/// log c_{m+1}(kappa), the vMF normalizing constant on S^m. kappa > 0.
double log_norm_const(int m, double kappa);

/// log c_{m+1}(kappa) + kappa <x, mu>.
double vmf_log_density(int m, const VmfComponent& comp, std::span<const double> x);

/// Finite vMF mixture sum_h pi_h f(x; mu_h, kappa_h) on S^m.
class VmfMixture {
 public:
  /// Validates: H >= 1, all means on S^m, kappa > 0, weights >= 0 summing to 1 within 1e-12.
  VmfMixture(int m, std::vector<VmfComponent> components, std::vector<double> weights);

  int m() const { return m_; }
  std::size_t size() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  double weight(std::size_t h) const { return weights_[h]; }
  double kappa(std::size_t h) const { return kappas_[h]; }
  std::span<const double> mean(std::size_t h) const;
  VmfComponent component(std::size_t h) const;
  std::vector<VmfComponent> components() const;

  /// Log-sum-exp accumulation of the component terms.
  double density(std::span<const double> x) const;
  double log_density(std::span<const double> x) const;

 private:
  int m_;
  std::vector<double> means_;  // flat, (m+1) per component
  std::vector<double> kappas_;
  std::vector<double> weights_;
  std::vector<double> log_terms_;  // log pi_h + log c(kappa_h); -inf for zero weight
};

double mixture_density(const VmfMixture& mix, std::span<const double> x);

/// The kernel K_n(t) = c_{m+1}(n) exp(n t): the vMF density at inner product t.
class VmfKernel {
 public:
  VmfKernel(int m, double n);

  int m() const { return m_; }
  double n() const { return n_; }
  double log_norm() const { return log_norm_; }
  double log_eval(double t) const { return log_norm_ + n_ * t; }
  double operator()(double t) const;

  /// K_n as a density with respect to the normalized measure d omega / omega_m,
  /// i.e. omega_m * c_{m+1}(n) exp(n t). Its Funk-Hecke coefficient a_0 is 1 and
  /// its spherical convolution with f equals int c_{m+1}(n) e^{n<x,y>} f(y) d omega(y).
  ZonalKernel zonal() const;

 private:
  int m_;
  double n_;
  double log_norm_;
};

/// K_n(t); throws DomainError for |t| > 1.
double kernel_eval(const VmfKernel& kernel, double t);

/// Wood's rejection sampler for <x, mu> plus a uniform tangent direction.
/// Deterministic for a given seed.
std::vector<UnitVector> sample_vmf(int m, const VmfComponent& comp, std::size_t count, std::uint64_t seed);

/// Component labels from a categorical draw, then per-component vMF streams.
/// For H = 1 the output equals sample_vmf with the same seed.
std::vector<UnitVector> sample_mixture(const VmfMixture& mix, std::size_t count, std::uint64_t seed);

}  // namespace spheremix
