#pragma once

#include <cstdint>
#include <span>

namespace spheremix {

/// Sphere dimension m (S^m in R^{m+1}) and spherical-harmonic degree k.
struct HarmonicDegreeSpec {
  int m = 2;
  int k = 0;
};

/// Natural log of the modified Bessel function I_v(x).
///
/// Power series for x <= max(10, v); otherwise Steed's continued fractions
/// (CF1 for I'_v/I_v, CF2 for the exponentially scaled K_mu) combined through
/// the Wronskian. Everything stays in log space so x up to ~1e300 is fine.
/// Throws DomainError for x <= 0, v < 0 or non-finite input.
double log_bessel_i(double v, double x);

/// log Gamma(x) for x > 0.
double log_gamma(double x);

/// Total surface measure of S^m, 2 pi^{(m+1)/2} / Gamma((m+1)/2).
double surface_measure(int m);

/// Dimension N_k^m of the space of degree-k spherical harmonics in m+1 variables.
std::uint64_t harmonic_dimension(HarmonicDegreeSpec spec);

/// Gegenbauer polynomial of index (m-1)/2 scaled so that its value at t = 1 is N_k^m.
double gegenbauer_normalized(HarmonicDegreeSpec spec, double t);

/// Q_k(t)/Q_k(1) for k = 0..out.size()-1. This is the Legendre polynomial of
/// dimension m+1 (Chebyshev T_k for m = 1, Legendre P_k for m = 2).
void gegenbauer_ratio_all(int m, double t, std::span<double> out);

/// int_a^b sin^p(theta) d theta for p >= 0, by the closed-form reduction formula.
double sin_power_integral(int p, double a, double b);

}  // namespace spheremix
