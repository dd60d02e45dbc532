#include "spheremix/vmf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "spheremix/errors.hpp"
#include "spheremix/special_functions.hpp"

namespace spheremix {

namespace {

// exp, with results below the smallest normal double flushed to zero
// (subnormal exp is very slow and numerically irrelevant here)
double exp_flush(double v) { return v < -708.0 ? 0.0 : std::exp(v); }

void check_kappa(double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("kappa must be finite and > 0");
}

std::uint64_t component_seed(std::uint64_t seed, std::size_t h) {
  // splitmix64 step; component 0 keeps the caller's seed
  if (h == 0) return seed;
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(h);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

double log_norm_const(int m, double kappa) {
  if (m < 1) throw DomainError("log_norm_const: m must be >= 1");
  check_kappa(kappa);
  const double half_d = 0.5 * (m + 1);
  const double v = half_d - 1.0;
  return v * std::log(kappa) - half_d * std::log(2.0 * std::numbers::pi) - log_bessel_i(v, kappa);
}

double vmf_log_density(int m, const VmfComponent& comp, std::span<const double> x) {
  if (comp.mu.m() != m || x.size() != comp.mu.size()) throw DomainError("vmf_log_density: dimension mismatch");
  return log_norm_const(m, comp.kappa) + comp.kappa * dot(x, comp.mu);
}

VmfMixture::VmfMixture(int m, std::vector<VmfComponent> components, std::vector<double> weights)
    : m_(m), weights_(std::move(weights)) {
  if (m < 1) throw DomainError("VmfMixture: m must be >= 1");
  if (components.empty()) throw DomainError("VmfMixture: need at least one component");
  if (components.size() != weights_.size()) throw DomainError("VmfMixture: one weight per component");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("VmfMixture: weights must be finite and >= 0");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("VmfMixture: weights sum to " + std::to_string(total) + ", not 1");
  }
  const auto d = static_cast<std::size_t>(m) + 1;
  means_.reserve(components.size() * d);
  for (std::size_t h = 0; h < components.size(); ++h) {
    const auto& c = components[h];
    if (c.mu.m() != m) throw DomainError("VmfMixture: component mean has wrong dimension");
    check_kappa(c.kappa);
    means_.insert(means_.end(), c.mu.coords().begin(), c.mu.coords().end());
    kappas_.push_back(c.kappa);
    log_terms_.push_back(weights_[h] > 0.0 ? std::log(weights_[h]) + log_norm_const(m, c.kappa)
                                          : -std::numeric_limits<double>::infinity());
  }
}

std::span<const double> VmfMixture::mean(std::size_t h) const {
  const auto d = static_cast<std::size_t>(m_) + 1;
  return std::span<const double>(means_).subspan(h * d, d);
}

VmfComponent VmfMixture::component(std::size_t h) const {
  const auto mu = mean(h);
  return VmfComponent{UnitVector(std::vector<double>(mu.begin(), mu.end())), kappas_[h]};
}

std::vector<VmfComponent> VmfMixture::components() const {
  std::vector<VmfComponent> out;
  out.reserve(size());
  for (std::size_t h = 0; h < size(); ++h) out.push_back(component(h));
  return out;
}

double VmfMixture::log_density(std::span<const double> x) const {
  const auto d = static_cast<std::size_t>(m_) + 1;
  if (x.size() != d) throw DomainError("VmfMixture: point has wrong dimension");
  thread_local std::vector<double> terms;
  terms.resize(size());
  double top = -std::numeric_limits<double>::infinity();
  const double* mu = means_.data();
  for (std::size_t h = 0; h < size(); ++h, mu += d) {
    double t = 0.0;
    for (std::size_t i = 0; i < d; ++i) t += mu[i] * x[i];
    const double a = log_terms_[h] + kappas_[h] * t;
    terms[h] = a;
    top = std::max(top, a);
  }
  // terms more than 745 below the top underflow anyway
  double s = 0.0;
  for (double a : terms) {
    const double e = a - top;
    if (e > -745.0) s += std::exp(e);
  }
  return top + std::log(s);
}

double VmfMixture::density(std::span<const double> x) const { return exp_flush(log_density(x)); }

double mixture_density(const VmfMixture& mix, std::span<const double> x) { return mix.density(x); }

VmfKernel::VmfKernel(int m, double n) : m_(m), n_(n), log_norm_(log_norm_const(m, n)) {}

double VmfKernel::operator()(double t) const { return exp_flush(log_eval(t)); }

ZonalKernel VmfKernel::zonal() const {
  const double shift = std::log(surface_measure(m_)) + log_norm_;
  const double n = n_;
  ZonalKernel k;
  k.log_eval = [shift, n](double t) { return shift + n * t; };
  k.eval = [shift, n](double t) { return exp_flush(shift + n * t); };
  k.description = "vmf(m=" + std::to_string(m_) + ", n=" + std::to_string(n_) + ")";
  return k;
}

double kernel_eval(const VmfKernel& kernel, double t) {
  if (!(std::abs(t) <= 1.0)) throw DomainError("kernel_eval: |t| must be <= 1");
  return kernel(t);
}

std::vector<UnitVector> sample_vmf(int m, const VmfComponent& comp, std::size_t count, std::uint64_t seed) {
  if (comp.mu.m() != m) throw DomainError("sample_vmf: dimension mismatch");
  check_kappa(comp.kappa);
  const auto d = static_cast<std::size_t>(m) + 1;
  const double dm1 = static_cast<double>(d - 1);
  const double kappa = comp.kappa;
  const double b = dm1 / (2.0 * kappa + std::sqrt(4.0 * kappa * kappa + dm1 * dm1));
  const double x0 = (1.0 - b) / (1.0 + b);
  const double c = kappa * x0 + dm1 * std::log(1.0 - x0 * x0);

  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gamma(0.5 * dm1, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<UnitVector> out;
  out.reserve(count);
  std::vector<double> v(d);
  std::vector<double> x(d);
  const auto mu = comp.mu.coords();
  for (std::size_t s = 0; s < count; ++s) {
    double w = 0.0;
    for (;;) {
      const double g1 = gamma(rng);
      const double g2 = gamma(rng);
      const double z = g1 / (g1 + g2);
      w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
      const double u = uniform(rng);
      if (kappa * w + dm1 * std::log(1.0 - x0 * w) - c >= std::log(u)) break;
    }
    double norm2 = 0.0;
    while (!(norm2 > 1e-20)) {
      for (auto& vi : v) vi = normal(rng);
      const double proj = dot(v, mu);
      norm2 = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        v[i] -= proj * mu[i];
        norm2 += v[i] * v[i];
      }
    }
    const double scale = std::sqrt(std::max(0.0, 1.0 - w * w) / norm2);
    for (std::size_t i = 0; i < d; ++i) x[i] = w * mu[i] + scale * v[i];
    out.emplace_back(x);
  }
  return out;
}

std::vector<UnitVector> sample_mixture(const VmfMixture& mix, std::size_t count, std::uint64_t seed) {
  const std::size_t h_count = mix.size();
  if (h_count == 1) return sample_vmf(mix.m(), mix.component(0), count, seed);

  std::vector<std::size_t> labels(count);
  std::vector<std::size_t> occupancy(h_count, 0);
  {
    std::mt19937_64 rng(component_seed(seed, h_count + 1));
    std::discrete_distribution<std::size_t> pick(mix.weights().begin(), mix.weights().end());
    for (auto& l : labels) {
      l = pick(rng);
      ++occupancy[l];
    }
  }
  std::vector<std::vector<UnitVector>> streams;
  streams.reserve(h_count);
  for (std::size_t h = 0; h < h_count; ++h) {
    streams.push_back(sample_vmf(mix.m(), mix.component(h), occupancy[h], component_seed(seed, h)));
  }
  std::vector<std::size_t> cursor(h_count, 0);
  std::vector<UnitVector> out;
  out.reserve(count);
  for (std::size_t l : labels) out.push_back(streams[l][cursor[l]++]);
  return out;
}

}  // namespace spheremix
