#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>

namespace spheremix {

/// A kernel K on [-1, 1], applied on the sphere as K(<x, y>).
///
/// Positive kernels should supply `log_eval`; evaluation then goes through
/// exp(log K(t)), which keeps sharply peaked kernels finite.
struct ZonalKernel {
  std::function<double(double)> eval;
  std::function<double(double)> log_eval;
  std::string description;

  double operator()(double t) const {
    if (!log_eval) return eval(t);
    const double l = log_eval(t);
    return l < -708.0 ? 0.0 : std::exp(l);
  }
  bool positive() const { return static_cast<bool>(log_eval); }
};

inline ZonalKernel make_kernel(std::function<double(double)> fn, std::string description) {
  return ZonalKernel{std::move(fn), nullptr, std::move(description)};
}

inline ZonalKernel constant_kernel(double c) {
  return make_kernel([c](double) { return c; }, "constant(" + std::to_string(c) + ")");
}

}  // namespace spheremix
