#pragma once

#include <span>
#include <string>
#include <vector>

#include "spheremix/quadrature.hpp"
#include "spheremix/sphere_geometry.hpp"
#include "spheremix/vmf.hpp"
#include "spheremix/zonal_kernel.hpp"

namespace spheremix {

/// Gauss-Legendre doubling: start at `initial_order`, double until two
/// successive results agree to `tolerance` (relative to the largest entry).
struct QuadratureOptions {
  int initial_order = 128;
  int max_order = 8192;
  double tolerance = 1e-10;
};

/// Weighted integral over t in [t_lo, t_hi] of g(t) (1 - t^2)^{(m-2)/2}, for a
/// vector-valued g writing `count` values. Throws NonConvergence at max_order.
std::vector<double> adaptive_weighted_integral(int m, double t_lo, double t_hi, std::size_t count,
                                               const std::function<void(double, std::span<double>)>& g,
                                               const QuadratureOptions& options = {});

struct FunkHeckeCoefficients {
  int m = 2;
  std::string kernel;
  std::vector<double> values;  ///< a_0 .. a_kmax
};

/// a_k^m(K) = (omega_{m-1}/omega_m) int K(t) Q_k(t)/Q_k(1) (1-t^2)^{(m-2)/2} dt.
double funk_hecke_coefficient(int m, const ZonalKernel& kernel, int k, const QuadratureOptions& options = {});
FunkHeckeCoefficients funk_hecke_coefficients(int m, const ZonalKernel& kernel, int kmax,
                                              const QuadratureOptions& options = {});

/// ||K||_{1,m}. Sign changes of K are located first so |K| is integrated piecewise smooth.
double kernel_l1m_norm(int m, const ZonalKernel& kernel, const QuadratureOptions& options = {});

/// (omega_{m-1}/omega_m) int_{-1}^{rho} K_n(t) (1-t^2)^{(m-2)/2} dt, with K_n in
/// its normalized-measure form (so the full integral is 1).
double condition2_tail(const VmfKernel& kernel, double rho, const QuadratureOptions& options = {});

/// omega_m({y : <x, y> <= rho}).
double cap_measure_below(int m, double rho);
/// omega_m({y : <x, y> >= t0}).
double cap_measure_above(int m, double t0);

/// Upper bound on the condition-2 tail:
///   omega_m({<x,y> <= rho}) e^{n rho} / (e^{n(1-delta)} omega_m(B_delta(x))),
/// valid for delta > 0 with 1 - delta > rho. Returned in log space to avoid overflow.
double log_tail_bound(const VmfKernel& kernel, double rho, double delta);
double tail_bound(const VmfKernel& kernel, double rho, double delta);

/// Spherical convolution (K * f)(x) = (1/omega_m) int K(<x,y>) f(y) d omega(y).
///
/// The rule is given in canonical orientation (colatitude measured from the
/// north pole) and is reflected so its pole lands on x; K then only sees the
/// first colatitude, where the Gauss nodes resolve sharp peaks.
class SphericalConvolver {
 public:
  SphericalConvolver(int m, const ZonalKernel& kernel, SphereRule rule);

  double operator()(const SphereFunction& f, std::span<const double> x) const;
  int m() const { return m_; }
  std::size_t active_points() const { return active_.size(); }

 private:
  int m_;
  SphereRule rule_;
  std::vector<std::size_t> active_;    // rule points with non-negligible kernel weight
  std::vector<double> kernel_weight_;  // w_j K(<pole, p_j>) / omega_m for active points
};

double spherical_convolve(int m, const ZonalKernel& kernel, const SphereFunction& f, std::span<const double> x,
                          const SphereRule& rule);

struct Lemma1Row {
  double n = 0.0;
  std::vector<double> coefficients;  ///< a_0 .. a_kmax
  std::vector<double> tails;         ///< one per rho
  std::vector<double> bounds;        ///< one per rho, delta = (1 - rho)/2
};

struct Lemma1Report {
  int m = 2;
  int kmax = 0;
  std::vector<double> rhos;
  std::vector<Lemma1Row> rows;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Tabulates a_0 (condition 1), condition-2 tails with their analytic bounds,
/// and the a_k spectrum for each n; lists every violated expectation.
Lemma1Report lemma1_report(int m, std::span<const double> ns, std::span<const double> rhos, int kmax,
                           const QuadratureOptions& options = {});

/// CSV with header m,n,a_0,rho,tail,bound (one row per (n, rho)).
std::string lemma1_csv(const Lemma1Report& report);

}  // namespace spheremix
