#include "spheremix/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spheremix/errors.hpp"
#include "spheremix/special_functions.hpp"

namespace spheremix {

namespace {

double omega_ratio(int m) { return surface_measure(m - 1) / surface_measure(m); }

void check_m(int m) {
  if (m < 1) throw DomainError("m must be >= 1");
}

double max_abs(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

// Sign changes of K located on a theta grid and refined by bisection, as t values.
std::vector<double> kernel_sign_changes(const ZonalKernel& kernel) {
  constexpr int kSamples = 1024;
  std::vector<double> roots;
  double th_prev = 0.0;
  double k_prev = kernel(1.0);
  for (int i = 1; i <= kSamples; ++i) {
    const double th = std::numbers::pi * i / kSamples;
    const double k_cur = kernel(std::cos(th));
    if ((k_prev < 0.0 && k_cur > 0.0) || (k_prev > 0.0 && k_cur < 0.0)) {
      double lo = th_prev;
      double hi = th;
      for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double km = kernel(std::cos(mid));
        if ((km < 0.0) == (k_prev < 0.0) && km != 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      roots.push_back(std::cos(0.5 * (lo + hi)));
    }
    if (k_cur != 0.0) {
      th_prev = th;
      k_prev = k_cur;
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace

std::vector<double> adaptive_weighted_integral(int m, double t_lo, double t_hi, std::size_t count,
                                               const std::function<void(double, std::span<double>)>& g,
                                               const QuadratureOptions& options) {
  check_m(m);
  std::vector<double> tmp(count);
  auto evaluate = [&](int order) {
    const IntervalRule rule = interval_rule(m, order, t_lo, t_hi);
    std::vector<double> acc(count, 0.0);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      g(rule.nodes[i], tmp);
      for (std::size_t j = 0; j < count; ++j) acc[j] += rule.weights[i] * tmp[j];
    }
    return acc;
  };
  int order = std::max(1, options.initial_order);
  std::vector<double> prev = evaluate(order);
  for (;;) {
    order *= 2;
    if (order > options.max_order) {
      throw NonConvergence("adaptive quadrature did not reach tolerance " + std::to_string(options.tolerance) +
                           " by order " + std::to_string(options.max_order));
    }
    std::vector<double> cur = evaluate(order);
    double diff = 0.0;
    for (std::size_t j = 0; j < count; ++j) diff = std::max(diff, std::abs(cur[j] - prev[j]));
    if (diff <= options.tolerance * max_abs(cur)) return cur;
    prev = std::move(cur);
  }
}

FunkHeckeCoefficients funk_hecke_coefficients(int m, const ZonalKernel& kernel, int kmax,
                                              const QuadratureOptions& options) {
  check_m(m);
  if (kmax < 0) throw DomainError("funk_hecke_coefficients: kmax must be >= 0");
  const auto count = static_cast<std::size_t>(kmax) + 1;
  auto integrand = [&](double t, std::span<double> out) {
    gegenbauer_ratio_all(m, t, out);
    const double k = kernel(t);
    for (double& v : out) v *= k;
  };
  std::vector<double> a = adaptive_weighted_integral(m, -1.0, 1.0, count, integrand, options);
  const double scale = omega_ratio(m);
  for (double& v : a) v *= scale;
  return FunkHeckeCoefficients{m, kernel.description, std::move(a)};
}

double funk_hecke_coefficient(int m, const ZonalKernel& kernel, int k, const QuadratureOptions& options) {
  check_m(m);
  if (k < 0) throw DomainError("funk_hecke_coefficient: k must be >= 0");
  // |K| rides along so the stopping test is relative to the kernel mass; a_k itself may be 0
  std::vector<double> p(static_cast<std::size_t>(k) + 1);
  auto integrand = [&](double t, std::span<double> out) {
    gegenbauer_ratio_all(m, t, p);
    const double kt = kernel(t);
    out[0] = kt * p.back();
    out[1] = std::abs(kt);
  };
  const auto r = adaptive_weighted_integral(m, -1.0, 1.0, 2, integrand, options);
  return omega_ratio(m) * r[0];
}

double kernel_l1m_norm(int m, const ZonalKernel& kernel, const QuadratureOptions& options) {
  check_m(m);
  std::vector<double> cuts{-1.0};
  if (!kernel.positive()) {
    for (double r : kernel_sign_changes(kernel)) {
      if (r > cuts.back()) cuts.push_back(r);
    }
  }
  if (cuts.back() < 1.0) cuts.push_back(1.0);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i] < cuts[i + 1])) continue;
    auto g = [&](double t, std::span<double> out) { out[0] = std::abs(kernel(t)); };
    const auto piece = adaptive_weighted_integral(m, cuts[i], cuts[i + 1], 1, g, options);
    total += piece[0];
  }
  return omega_ratio(m) * total;
}

double condition2_tail(const VmfKernel& kernel, double rho, const QuadratureOptions& options) {
  if (!(rho > -1.0 && rho < 1.0)) throw DomainError("condition2_tail: rho must lie in (-1, 1)");
  const int m = kernel.m();
  const ZonalKernel k = kernel.zonal();
  auto g = [&](double t, std::span<double> out) { out[0] = k(t); };
  const auto r = adaptive_weighted_integral(m, -1.0, rho, 1, g, options);
  return std::clamp(omega_ratio(m) * r[0], 0.0, 1.0);
}

double cap_measure_below(int m, double rho) {
  check_m(m);
  if (rho <= -1.0) return 0.0;
  if (rho >= 1.0) return surface_measure(m);
  const auto r = adaptive_weighted_integral(m, -1.0, rho, 1, [](double, std::span<double> out) { out[0] = 1.0; });
  return surface_measure(m - 1) * r[0];
}

double cap_measure_above(int m, double t0) {
  check_m(m);
  if (t0 >= 1.0) return 0.0;
  if (t0 <= -1.0) return surface_measure(m);
  const auto r = adaptive_weighted_integral(m, t0, 1.0, 1, [](double, std::span<double> out) { out[0] = 1.0; });
  return surface_measure(m - 1) * r[0];
}

double log_tail_bound(const VmfKernel& kernel, double rho, double delta) {
  if (!(rho > -1.0 && rho < 1.0)) throw DomainError("tail_bound: rho must lie in (-1, 1)");
  if (!(delta > 0.0 && 1.0 - delta > rho)) throw DomainError("tail_bound: need delta > 0 and 1 - delta > rho");
  const int m = kernel.m();
  const double n = kernel.n();
  return std::log(cap_measure_below(m, rho)) + n * rho - n * (1.0 - delta) - std::log(cap_measure_above(m, 1.0 - delta));
}

double tail_bound(const VmfKernel& kernel, double rho, double delta) {
  return std::exp(log_tail_bound(kernel, rho, delta));
}

SphericalConvolver::SphericalConvolver(int m, const ZonalKernel& kernel, SphereRule rule)
    : m_(m), rule_(std::move(rule)) {
  check_m(m);
  if (rule_.m != m) throw DomainError("SphericalConvolver: rule dimension mismatch");
  const double inv_omega = 1.0 / surface_measure(m);
  const auto last = static_cast<std::size_t>(m);
  std::vector<double> kw(rule_.size());
  double top = 0.0;
  for (std::size_t j = 0; j < rule_.size(); ++j) {
    kw[j] = rule_.weights[j] * kernel(rule_.point(j)[last]) * inv_omega;
    top = std::max(top, std::abs(kw[j]));
  }
  // contributions below 1e-18 of the largest are dropped
  for (std::size_t j = 0; j < rule_.size(); ++j) {
    if (std::abs(kw[j]) > 1e-18 * top) {
      active_.push_back(j);
      kernel_weight_.push_back(kw[j]);
    }
  }
}

double SphericalConvolver::operator()(const SphereFunction& f, std::span<const double> x) const {
  const auto d = static_cast<std::size_t>(m_) + 1;
  if (x.size() != d) throw DomainError("spherical_convolve: point has wrong dimension");
  // Householder reflection swapping the north pole and x
  std::vector<double> v(x.begin(), x.end());
  v[d - 1] -= 1.0;
  double vv = 0.0;
  for (double c : v) vv += c * c;
  const bool identity = vv < 1e-30;
  std::vector<double> y(d);
  double s = 0.0;
  for (std::size_t a = 0; a < active_.size(); ++a) {
    const auto p = rule_.point(active_[a]);
    if (identity) {
      std::copy(p.begin(), p.end(), y.begin());
    } else {
      const double c = 2.0 * dot(v, p) / vv;
      for (std::size_t i = 0; i < d; ++i) y[i] = p[i] - c * v[i];
    }
    s += kernel_weight_[a] * f(y);
  }
  return s;
}

double spherical_convolve(int m, const ZonalKernel& kernel, const SphereFunction& f, std::span<const double> x,
                          const SphereRule& rule) {
  return SphericalConvolver(m, kernel, rule)(f, x);
}

Lemma1Report lemma1_report(int m, std::span<const double> ns, std::span<const double> rhos, int kmax,
                           const QuadratureOptions& options) {
  check_m(m);
  if (ns.empty()) throw DomainError("lemma1_report: empty n list");
  if (kmax < 0) throw DomainError("lemma1_report: kmax must be >= 0");
  Lemma1Report report;
  report.m = m;
  report.kmax = kmax;
  report.rhos.assign(rhos.begin(), rhos.end());
  std::vector<double> sorted(ns.begin(), ns.end());
  std::sort(sorted.begin(), sorted.end());
  for (double n : sorted) {
    const VmfKernel kernel(m, n);
    Lemma1Row row;
    row.n = n;
    row.coefficients = funk_hecke_coefficients(m, kernel.zonal(), kmax, options).values;
    for (double rho : rhos) {
      row.tails.push_back(condition2_tail(kernel, rho, options));
      row.bounds.push_back(tail_bound(kernel, rho, 0.5 * (1.0 - rho)));
    }
    report.rows.push_back(std::move(row));
  }

  auto flag = [&](const std::string& what) { report.violations.push_back(what); };
  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    const auto& row = report.rows[r];
    const std::string tag = "n=" + std::to_string(row.n);
    if (std::abs(row.coefficients[0] - 1.0) > 1e-8) flag(tag + ": a_0 differs from 1 by more than 1e-8");
    for (std::size_t k = 1; k < row.coefficients.size(); ++k) {
      const double a = row.coefficients[k];
      if (!(a > 0.0 && a < row.coefficients[0])) flag(tag + ": a_" + std::to_string(k) + " outside (0, a_0)");
    }
    for (std::size_t i = 0; i < row.tails.size(); ++i) {
      if (row.tails[i] > row.bounds[i]) flag(tag + ": tail exceeds bound at rho=" + std::to_string(report.rhos[i]));
    }
    if (r == 0) continue;
    const auto& prev = report.rows[r - 1];
    if (prev.n == row.n) continue;
    for (std::size_t i = 0; i < row.tails.size(); ++i) {
      if (!(row.tails[i] < prev.tails[i])) {
        flag(tag + ": tail not strictly decreasing in n at rho=" + std::to_string(report.rhos[i]));
      }
    }
    for (std::size_t k = 1; k < row.coefficients.size(); ++k) {
      if (!(row.coefficients[k] > prev.coefficients[k])) {
        flag(tag + ": a_" + std::to_string(k) + " not increasing in n");
      }
    }
  }
  return report;
}

std::string lemma1_csv(const Lemma1Report& report) {
  std::ostringstream os;
  os.precision(17);
  os << "m,n,a_0,rho,tail,bound\n";
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < report.rhos.size(); ++i) {
      os << report.m << ',' << row.n << ',' << row.coefficients[0] << ',' << report.rhos[i] << ','
         << row.tails[i] << ',' << row.bounds[i] << '\n';
    }
  }
  return os.str();
}

}  // namespace spheremix
