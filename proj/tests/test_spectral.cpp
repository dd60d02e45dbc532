#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "oracles.hpp"
#include "spheremix/errors.hpp"
#include "spheremix/quadrature.hpp"
#include "spheremix/special_functions.hpp"
#include "spheremix/spectral.hpp"
#include "spheremix/vmf.hpp"

using namespace spheremix;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> unit(std::vector<double> v) { return UnitVector(std::move(v)).vector(); }

}  // namespace

TEST_CASE("a_0 of K_n is one") {
  for (int m : {1, 2, 3, 5}) {
    for (double n : {0.5, 1.0, 10.0, 100.0, 1000.0}) {
      CHECK(std::abs(funk_hecke_coefficient(m, VmfKernel(m, n).zonal(), 0) - 1.0) <= 1e-8);
    }
  }
}

TEST_CASE("constant kernel has a_0 = c and a_k = 0") {
  for (int m : {1, 2, 3, 6}) {
    const auto coeffs = funk_hecke_coefficients(m, constant_kernel(1.0), 8);
    CHECK(coeffs.values[0] == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 1; k <= 8; ++k) CHECK(std::abs(coeffs.values[static_cast<std::size_t>(k)]) <= 1e-12);
  }
}

TEST_CASE("m = 2 vMF eigenvalues are Bessel ratios") {
  for (double n : {1.0, 10.0, 100.0}) {
    const auto coeffs = funk_hecke_coefficients(2, VmfKernel(2, n).zonal(), 12);
    const double l0 = oracle::log_bessel_i(0.5, n);
    double prev = 2.0;
    for (int k = 0; k <= 12; ++k) {
      const double expected = std::exp(oracle::log_bessel_i(k + 0.5, n) - l0);
      const double a = coeffs.values[static_cast<std::size_t>(k)];
      CAPTURE(n);
      CAPTURE(k);
      CHECK(std::abs(a - expected) <= 1e-9 * expected + 1e-13);
      CHECK(a < prev);
      prev = a;
    }
  }
  // a_1 -> 1
  double prev = 0.0;
  for (double n : {1.0, 10.0, 100.0, 1000.0}) {
    const double a1 = funk_hecke_coefficient(2, VmfKernel(2, n).zonal(), 1);
    CHECK(a1 > prev);
    prev = a1;
  }
  CHECK(prev > 0.998);
}

TEST_CASE("general m eigenvalues are Bessel ratios") {
  // a_k = I_{k + (m-1)/2}(n) / I_{(m-1)/2}(n)
  for (int m : {1, 3, 4}) {
    for (double n : {2.0, 25.0}) {
      const double v = 0.5 * (m - 1);
      const auto coeffs = funk_hecke_coefficients(m, VmfKernel(m, n).zonal(), 6);
      for (int k = 0; k <= 6; ++k) {
        const double expected = std::exp(oracle::log_bessel_i(k + v, n) - oracle::log_bessel_i(v, n));
        CHECK(coeffs.values[static_cast<std::size_t>(k)] == doctest::Approx(expected).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("eigenvalue bounds 0 < a_k < a_0") {
  for (int m : {1, 2, 3}) {
    for (double n : {0.5, 5.0, 80.0}) {
      const auto c = funk_hecke_coefficients(m, VmfKernel(m, n).zonal(), 10);
      for (int k = 1; k <= 10; ++k) {
        CHECK(c.values[static_cast<std::size_t>(k)] > 0.0);
        CHECK(c.values[static_cast<std::size_t>(k)] < c.values[0]);
      }
    }
  }
}

TEST_CASE("kernel_l1m_norm") {
  for (int m : {1, 2, 4}) {
    for (double n : {0.5, 30.0, 900.0}) CHECK(kernel_l1m_norm(m, VmfKernel(m, n).zonal()) == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(kernel_l1m_norm(3, constant_kernel(-2.5)) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(kernel_l1m_norm(2, make_kernel([](double t) { return t; }, "t")) == doctest::Approx(0.5).epsilon(1e-12));
  // sign changes inside the interval
  CHECK(kernel_l1m_norm(2, make_kernel([](double t) { return t * t - 0.25; }, "t^2 - 1/4")) ==
        doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("condition2_tail") {
  for (int m : {1, 2, 3}) {
    const VmfKernel k(m, 5.0);
    CHECK(condition2_tail(k, 1.0 - 1e-12) == doctest::Approx(1.0).epsilon(1e-5));
    const double t = condition2_tail(k, 0.2);
    CHECK(t >= 0.0);
    CHECK(t <= 1.0);
  }
  // m = 2 closed form: (1/2) int_{-1}^{rho} n e^{nt}/(2 sinh n) dt
  for (double n : {1.0, 7.0, 60.0}) {
    for (double rho : {-0.5, 0.0, 0.5}) {
      const double exact = (std::exp(n * (rho - 1.0)) - std::exp(-2.0 * n)) / (1.0 - std::exp(-2.0 * n));
      CHECK(condition2_tail(VmfKernel(2, n), rho) == doctest::Approx(exact).epsilon(1e-10).scale(1e-300));
    }
  }
  CHECK_THROWS_AS(condition2_tail(VmfKernel(2, 1.0), 1.5), DomainError);
}

TEST_CASE("condition2_tail decreases in n and sits under the analytic bound") {
  for (int m : {1, 2, 3, 5}) {
    for (double rho : {-0.5, 0.0, 0.5, 0.9}) {
      double prev = 2.0;
      for (double n = 1.0; n <= 256.0; n *= 2.0) {
        const VmfKernel k(m, n);
        const double tail = condition2_tail(k, rho);
        CHECK(tail < prev);
        prev = tail;
        for (double delta : {(1.0 - rho) / 2.0, (1.0 - rho) / 10.0, 0.9 * (1.0 - rho)}) {
          CHECK(std::log(tail) <= log_tail_bound(k, rho, delta) + 1e-12);
        }
      }
    }
  }
  CHECK_THROWS_AS(tail_bound(VmfKernel(2, 1.0), 0.5, 0.6), DomainError);
  CHECK_THROWS_AS(tail_bound(VmfKernel(2, 1.0), 0.5, 0.0), DomainError);
}

TEST_CASE("cap measures") {
  CHECK(cap_measure_below(2, 0.0) == doctest::Approx(2.0 * kPi).epsilon(1e-12));
  CHECK(cap_measure_above(2, 0.5) == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(cap_measure_below(1, 0.0) == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(cap_measure_below(3, 1.0) == doctest::Approx(surface_measure(3)).epsilon(1e-12));
  CHECK(cap_measure_below(3, 0.3) + cap_measure_above(3, 0.3) == doctest::Approx(surface_measure(3)).epsilon(1e-12));
}

TEST_CASE("spherical convolution of the uniform density") {
  for (int m : {1, 2, 3}) {
    const double u = 1.0 / surface_measure(m);
    const SphereFunction f{[u](std::span<const double>) { return u; }, true};
    const std::vector<int> orders = default_sphere_orders(m);
    const auto rule = sphere_rule(m, orders);
    for (double n : {1.0, 40.0}) {
      const SphericalConvolver conv(m, VmfKernel(m, n).zonal(), rule);
      std::vector<double> x(static_cast<std::size_t>(m) + 1, 0.0);
      x[0] = 0.6;
      x.back() = -0.8;
      CHECK(conv(f, x) == doctest::Approx(u).epsilon(1e-9));
    }
  }
}

TEST_CASE("Funk-Hecke identity on zonal harmonics") {
  const std::vector<double> e = unit({0.3, -0.2, 0.9});
  const auto rule = sphere_rule(2, default_sphere_orders(2));
  for (int k : {0, 1, 3, 6}) {
    const SphereFunction y{[&](std::span<const double> p) {
                             return gegenbauer_normalized({2, k}, std::clamp(dot(p, e), -1.0, 1.0)) /
                                    gegenbauer_normalized({2, k}, 1.0);
                           },
                           true};
    const auto kernel = VmfKernel(2, 10.0).zonal();
    const double a = funk_hecke_coefficient(2, kernel, k);
    const SphericalConvolver conv(2, kernel, rule);
    for (const auto& x : {unit({1.0, 0.0, 0.0}), unit({0.1, 0.5, -0.3}), e}) {
      CHECK(std::abs(conv(y, x) - a * y(x)) <= 1e-9);
    }
  }
}

TEST_CASE("convolution of a vMF density keeps unit mass") {
  const VmfMixture mix(2, {{UnitVector({0.0, 0.6, 0.8}), 3.0}}, {1.0});
  const SphereFunction f{[&](std::span<const double> x) { return mix.density(x); }, true};
  const SphericalConvolver conv(2, VmfKernel(2, 6.0).zonal(), sphere_rule(2, std::vector<int>{64, 128}));
  const double mass = sphere_rule(2, std::vector<int>{48, 96}).integrate([&](std::span<const double> x) {
    return conv(f, x);
  });
  CHECK(std::abs(mass - 1.0) <= 1e-8);
  // vMF * vMF on S^2 at the mean has the closed form int c(3) c(6) e^{3t+6t} over the sphere
  const double at_mu = conv(f, std::vector<double>{0.0, 0.6, 0.8});
  const double c3 = std::exp(log_norm_const(2, 3.0));
  const double c6 = std::exp(log_norm_const(2, 6.0));
  CHECK(at_mu == doctest::Approx(c3 * c6 / std::exp(log_norm_const(2, 9.0))).epsilon(1e-10));
}

TEST_CASE("convolution is linear") {
  const SphereFunction f{[](std::span<const double> x) { return 1.0 + x[0] * x[2]; }, true};
  const SphereFunction g{[](std::span<const double> x) { return std::exp(x[1]); }, true};
  const double alpha = 0.7;
  const double beta = -1.3;
  const SphereFunction h{[&](std::span<const double> x) { return alpha * f(x) + beta * g(x); }, true};
  const SphericalConvolver conv(2, VmfKernel(2, 15.0).zonal(), sphere_rule(2, std::vector<int>{64, 128}));
  for (const auto& x : {unit({1, 2, 3}), unit({-1, 0.2, 0.1}), unit({0, 0, -1})}) {
    const double lhs = conv(h, x);
    const double rhs = alpha * conv(f, x) + beta * conv(g, x);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("lemma1_report") {
  const std::vector<double> ns = {100.0, 1.0, 10.0};
  const std::vector<double> rhos = {0.0, 0.5};
  const auto report = lemma1_report(2, ns, rhos, 6);
  CHECK(report.ok());
  REQUIRE(report.rows.size() == 3);
  CHECK(report.rows[0].n == 1.0);
  for (const auto& row : report.rows) {
    CHECK(std::abs(row.coefficients[0] - 1.0) <= 1e-8);
    for (std::size_t r = 0; r < rhos.size(); ++r) CHECK(row.tails[r] <= row.bounds[r]);
  }
  const std::string csv = lemma1_csv(report);
  CHECK(csv.rfind("m,n,a_0,rho,tail,bound\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}
