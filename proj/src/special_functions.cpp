#include "spheremix/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "spheremix/errors.hpp"

namespace spheremix {

namespace {

constexpr double kEps = 1e-17;
constexpr int kMaxIter = 1'000'000;

double log_bessel_i_series(double v, double x) {
  // I_v(x) = (x/2)^v / Gamma(v+1) * sum_j (x^2/4)^j / (j! (v+1)_j); all terms positive
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int j = 1; j < kMaxIter; ++j) {
    term *= q / (j * (v + j));
    sum += term;
    if (term < kEps * sum) break;
  }
  return v * std::log(0.5 * x) - std::lgamma(v + 1.0) + std::log(sum);
}

// Requires x >= 2.
double log_bessel_i_steed(double v, double x) {
  const int nl = static_cast<int>(v + 0.5);
  const double mu = v - nl;
  const double xi = 1.0 / x;
  const double xi2 = 2.0 * xi;
  constexpr double tiny = 1e-300;

  // CF1: I'_v / I_v by modified Lentz.
  double h = std::max(v * xi, tiny);
  double b = xi2 * v;
  double d = 0.0;
  double c = h;
  int i = 1;
  for (; i < kMaxIter; ++i) {
    b += xi2;
    d = 1.0 / (b + d);
    c = b + 1.0 / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  if (i == kMaxIter) throw NonConvergence("log_bessel_i: CF1 did not converge");

  // Downward recurrence from order v to mu, starting from I_v = 1.
  double ril = 1.0;
  double ripl = h;
  double log_scale = 0.0;
  double fact = v * xi;
  for (int l = nl; l >= 1; --l) {
    const double ritemp = fact * ril + ripl;
    fact -= xi;
    ripl = fact * ritemp + ril;
    ril = ritemp;
    if (std::abs(ril) > 1e200) {
      ril *= 1e-200;
      ripl *= 1e-200;
      log_scale += 200.0 * std::numbers::ln10;
    }
  }
  const double f = ripl / ril;

  // CF2 (Steed): K_mu(x) e^x and K_{mu+1}(x) e^x.
  const double a1 = 0.25 - mu * mu;
  b = 2.0 * (1.0 + x);
  d = 1.0 / b;
  double delh = d;
  h = d;
  double q1 = 0.0;
  double q2 = 1.0;
  double q = a1;
  c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (i = 2; i < kMaxIter; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < 1e-16) break;
  }
  if (i == kMaxIter) throw NonConvergence("log_bessel_i: CF2 did not converge");
  h *= a1;
  const double kmu = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
  const double k1 = kmu * (mu + x + 0.5 - h) * xi;
  const double kmup = mu * xi * kmu - k1;
  // Wronskian: I_mu (f K_mu - K'_mu) = 1/x, here with the e^{x} scaling.
  const double imu_scaled = xi / (f * kmu - kmup);
  return x + std::log(imu_scaled) - std::log(ril) - log_scale;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;  // exact: r * (n-k+i) is divisible by i
  }
  return r;
}

}  // namespace

double log_bessel_i(double v, double x) {
  if (!std::isfinite(v) || !std::isfinite(x)) {
    throw DomainError("log_bessel_i: non-finite argument");
  }
  if (v < 0.0) throw DomainError("log_bessel_i: order must be >= 0");
  if (x <= 0.0) throw DomainError("log_bessel_i: argument must be > 0");
  if (x <= std::max(10.0, v)) return log_bessel_i_series(v, x);
  return log_bessel_i_steed(v, x);
}

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("log_gamma: argument must be > 0");
  return std::lgamma(x);
}

double surface_measure(int m) {
  if (m < 0) throw DomainError("surface_measure: m must be >= 0");
  const double h = 0.5 * (m + 1);
  return 2.0 * std::exp(h * std::log(std::numbers::pi) - std::lgamma(h));
}

std::uint64_t harmonic_dimension(HarmonicDegreeSpec spec) {
  if (spec.m < 1 || spec.k < 0) throw DomainError("harmonic_dimension: need m >= 1, k >= 0");
  const auto m = static_cast<std::uint64_t>(spec.m);
  const auto k = static_cast<std::uint64_t>(spec.k);
  // homogeneous polynomials of degree k minus those of degree k-2, in m+1 variables
  const std::uint64_t lower = k >= 2 ? binomial(k + m - 2, m) : 0;
  return binomial(k + m, m) - lower;
}

void gegenbauer_ratio_all(int m, double t, std::span<double> out) {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = t;
  // (k+m-1) P_{k+1} = (2k+m-1) t P_k - k P_{k-1}
  for (std::size_t k = 1; k + 1 < out.size(); ++k) {
    const double kk = static_cast<double>(k);
    out[k + 1] = ((2.0 * kk + m - 1.0) * t * out[k] - kk * out[k - 1]) / (kk + m - 1.0);
  }
}

double gegenbauer_normalized(HarmonicDegreeSpec spec, double t) {
  if (spec.m < 1 || spec.k < 0) throw DomainError("gegenbauer_normalized: need m >= 1, k >= 0");
  if (!(std::abs(t) <= 1.0)) throw DomainError("gegenbauer_normalized: |t| must be <= 1");
  std::vector<double> p(static_cast<std::size_t>(spec.k) + 1);
  gegenbauer_ratio_all(spec.m, t, p);
  return static_cast<double>(harmonic_dimension(spec)) * p.back();
}

double sin_power_integral(int p, double a, double b) {
  if (p < 0) throw DomainError("sin_power_integral: p must be >= 0");
  // F_p(x) = -sin^{p-1}x cos x / p + (p-1)/p F_{p-2}(x)
  auto antiderivative = [p](double x) {
    const double s = std::sin(x);
    const double c = std::cos(x);
    double lo = (p % 2 == 0) ? x : -c;
    for (int q = (p % 2 == 0) ? 2 : 3; q <= p; q += 2) {
      lo = -std::pow(s, q - 1) * c / q + (q - 1.0) / q * lo;
    }
    return lo;
  };
  return antiderivative(b) - antiderivative(a);
}

}  // namespace spheremix
