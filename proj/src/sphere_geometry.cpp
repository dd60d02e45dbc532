#include "spheremix/sphere_geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "spheremix/errors.hpp"
#include "spheremix/special_functions.hpp"

namespace spheremix {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_dimension(int m) {
  if (m < 1) throw DomainError("sphere dimension m must be >= 1");
}

void check_block(int m, const CoordinateBlock& block) {
  if (block.intervals.size() != static_cast<std::size_t>(m)) {
    throw DomainError("coordinate block needs exactly m intervals");
  }
}

double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

constexpr std::array<std::uint64_t, 16> kPrimes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

// Angle box of a block with pole-touching colatitude ends pulled inward.
std::vector<Interval> nudged_box(int m, const CoordinateBlock& block) {
  std::vector<Interval> box = block.intervals;
  for (int j = 0; j + 1 < m; ++j) {
    auto& iv = box[static_cast<std::size_t>(j)];
    if (iv.lo <= 0.0) iv.lo = std::min(kPoleNudge, iv.mid());
    if (iv.hi >= kPi) iv.hi = std::max(kPi - kPoleNudge, iv.mid());
  }
  return box;
}

// G(t) = int_0^t max(sin u, s) du on [0, pi].
double graded_integral(double s, double t) {
  const double a = std::asin(s);
  if (t <= a) return s * t;
  if (t <= kPi - a) return s * a + std::cos(a) - std::cos(t);
  return s * a + 2.0 * std::cos(a) + s * (t - (kPi - a));
}

// Solves G(t) = u * G(pi) by bisection.
double graded_cut(double s, double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return kPi;
  const double target = u * graded_integral(s, kPi);
  double lo = 0.0;
  double hi = kPi;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (graded_integral(s, mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

UnitVector::UnitVector(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.size() < 2) throw DomainError("UnitVector needs at least 2 coordinates");
  double s = 0.0;
  for (double c : coords_) {
    if (!std::isfinite(c)) throw DomainError("UnitVector: non-finite coordinate");
    s += c * c;
  }
  if (!(s > 0.0)) throw DomainError("UnitVector: zero vector");
  // vectors that are already unit length to rounding are kept bit-for-bit
  if (std::abs(s - 1.0) <= 4e-16 * static_cast<double>(coords_.size())) return;
  const double inv = 1.0 / std::sqrt(s);
  for (double& c : coords_) c *= inv;
}

UnitVector UnitVector::north_pole(int m) {
  check_dimension(m);
  std::vector<double> c(static_cast<std::size_t>(m) + 1, 0.0);
  c.back() = 1.0;
  return UnitVector(std::move(c));
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double geodesic_distance(std::span<const double> a, std::span<const double> b) {
  // atan2 form stays accurate for nearly equal and nearly antipodal points
  double cross2 = 0.0;
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += a[i] * b[i];
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double c = a[i] * b[j] - a[j] * b[i];
      cross2 += c * c;
    }
  }
  return std::atan2(std::sqrt(cross2), d);
}

void spherical_to_cartesian(int m, std::span<const double> thetas, double phi, std::span<double> out) {
  double s = 1.0;
  for (int j = 0; j + 1 < m; ++j) {
    const double th = thetas[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(m - j)] = s * std::cos(th);
    s *= std::sin(th);
  }
  out[1] = s * std::sin(phi);
  out[0] = s * std::cos(phi);
}

UnitVector spherical_to_cartesian(int m, const SphericalAngles& angles) {
  check_dimension(m);
  if (angles.thetas.size() != static_cast<std::size_t>(m - 1)) {
    throw DomainError("spherical_to_cartesian: need m-1 colatitudes");
  }
  std::vector<double> out(static_cast<std::size_t>(m) + 1);
  spherical_to_cartesian(m, angles.thetas, angles.phi, out);
  return UnitVector(std::move(out));
}

SphericalAngles cartesian_to_spherical(std::span<const double> x) {
  const int m = static_cast<int>(x.size()) - 1;
  check_dimension(m);
  SphericalAngles a;
  a.thetas.resize(static_cast<std::size_t>(m - 1));
  // tail2 = x_0^2 + ... + x_{i}^2, walked from the top coordinate down
  double tail2 = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) tail2 += x[i] * x[i];
  for (int j = 0; j + 1 < m; ++j) {
    const auto top = static_cast<std::size_t>(m - j);
    a.thetas[static_cast<std::size_t>(j)] = std::atan2(std::sqrt(tail2), x[top]);
    tail2 = std::max(0.0, tail2 - x[top - 1] * x[top - 1]);
  }
  if (x[0] == 0.0 && x[1] == 0.0) {
    a.phi = 0.0;
  } else {
    double phi = std::atan2(x[1], x[0]);
    if (phi < 0.0) phi += kTwoPi;
    if (phi >= kTwoPi) phi = 0.0;
    a.phi = phi;
  }
  return a;
}

bool CoordinateBlock::contains(const SphericalAngles& angles) const {
  if (intervals.size() != angles.thetas.size() + 1) return false;
  for (std::size_t j = 0; j < angles.thetas.size(); ++j) {
    if (!intervals[j].contains(angles.thetas[j])) return false;
  }
  return intervals.back().contains(angles.phi);
}

double SphericalPartition::total_measure() const {
  double s = 0.0;
  for (double w : measures) s += w;
  return s;
}

double block_measure(int m, const CoordinateBlock& block) {
  check_dimension(m);
  check_block(m, block);
  double measure = block.intervals.back().width();
  for (int j = 0; j + 1 < m; ++j) {
    const auto& iv = block.intervals[static_cast<std::size_t>(j)];
    measure *= sin_power_integral(m - 1 - j, iv.lo, iv.hi);
  }
  return measure;
}

SphericalPartition build_partition(int m, std::span<const int> levels, const PartitionOptions& options) {
  check_dimension(m);
  if (levels.size() != static_cast<std::size_t>(m)) {
    throw DomainError("build_partition: need one level count per angle (m of them)");
  }
  if (options.mode == PartitionMode::kGraded && !(options.sine_floor >= 0.0 && options.sine_floor <= 1.0)) {
    throw DomainError("build_partition: sine_floor must lie in [0, 1]");
  }
  double total = 1.0;
  for (int l : levels) {
    if (l < 1) throw DomainError("build_partition: level counts must be >= 1");
    total *= l;
  }
  if (total > static_cast<double>(options.max_blocks)) {
    throw ResourceError("build_partition: " + std::to_string(static_cast<long double>(total)) +
                        " blocks exceeds the cap of " + std::to_string(options.max_blocks));
  }

  std::vector<std::vector<Interval>> cuts(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const int l = levels[static_cast<std::size_t>(j)];
    const bool azimuth = j == m - 1;
    auto& c = cuts[static_cast<std::size_t>(j)];
    c.resize(static_cast<std::size_t>(l));
    for (int i = 0; i < l; ++i) {
      double lo = 0.0;
      double hi = 0.0;
      if (azimuth) {
        lo = kTwoPi * i / l;
        hi = kTwoPi * (i + 1) / l;
      } else if (j == 0 && options.mode == PartitionMode::kMeasureBalanced) {
        lo = std::acos(1.0 - 2.0 * i / l);
        hi = std::acos(1.0 - 2.0 * (i + 1) / l);
      } else if (j == 0 && options.mode == PartitionMode::kGraded) {
        lo = graded_cut(options.sine_floor, static_cast<double>(i) / l);
        hi = graded_cut(options.sine_floor, static_cast<double>(i + 1) / l);
      } else {
        lo = kPi * i / l;
        hi = kPi * (i + 1) / l;
      }
      c[static_cast<std::size_t>(i)] = {lo, hi};
    }
    // exact domain ends
    c.front().lo = 0.0;
    c.back().hi = azimuth ? kTwoPi : kPi;
  }

  SphericalPartition p;
  p.m = m;
  const auto n = static_cast<std::size_t>(total);
  p.blocks.reserve(n);
  p.measures.reserve(n);
  std::vector<std::size_t> idx(static_cast<std::size_t>(m), 0);
  for (std::size_t b = 0; b < n; ++b) {
    CoordinateBlock block;
    block.intervals.resize(static_cast<std::size_t>(m));
    for (std::size_t j = 0; j < idx.size(); ++j) block.intervals[j] = cuts[j][idx[j]];
    p.measures.push_back(block_measure(m, block));
    p.blocks.push_back(std::move(block));
    // last angle varies fastest
    for (std::size_t j = idx.size(); j-- > 0;) {
      if (++idx[j] < cuts[j].size()) break;
      idx[j] = 0;
    }
  }
  return p;
}

UnitVector block_center(int m, const CoordinateBlock& block) {
  check_dimension(m);
  check_block(m, block);
  SphericalAngles a;
  for (int j = 0; j + 1 < m; ++j) a.thetas.push_back(block.intervals[static_cast<std::size_t>(j)].mid());
  a.phi = block.intervals.back().mid();
  return spherical_to_cartesian(m, a);
}

MeanValuePoint mean_value_point(int m, const CoordinateBlock& block, const SphereFunction& f, double target_avg,
                                std::span<const double> anchor) {
  check_dimension(m);
  check_block(m, block);
  const std::vector<Interval> box = nudged_box(m, block);
  const auto dim = static_cast<std::size_t>(m);
  std::vector<double> x(dim + 1);

  auto eval_at = [&](std::span<const double> angles) {
    spherical_to_cartesian(m, angles.first(dim - 1), angles[dim - 1], x);
    return f(x);
  };

  if (!anchor.empty() && anchor.size() != dim) throw DomainError("mean_value_point: anchor needs m angles");

  // Net: block center followed by Halton points scaled into the box.
  std::vector<std::vector<double>> net;
  std::vector<double> net_values;
  const std::size_t net_size = 64 * dim;
  std::vector<double> angles(dim);
  std::vector<double> amin(dim);
  std::vector<double> amax(dim);
  double fmin = 0.0;
  double fmax = 0.0;
  for (std::size_t i = 0; i <= net_size; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double u = i == 0 ? 0.5 : radical_inverse(i, kPrimes[j % kPrimes.size()]);
      angles[j] = box[j].lo + u * box[j].width();
    }
    const double v = eval_at(angles);
    if (!anchor.empty()) {
      net.push_back(angles);
      net_values.push_back(v);
    }
    if (i == 0 || v < fmin) {
      fmin = v;
      amin = angles;
    }
    if (i == 0 || v > fmax) {
      fmax = v;
      amax = angles;
    }
  }

  const double tol = 1e-9 * std::max(1.0, std::abs(target_avg));
  auto make_result = [&](const std::vector<double>& a) {
    SphericalAngles sa;
    sa.thetas.assign(a.begin(), a.end() - 1);
    sa.phi = a.back();
    UnitVector p = spherical_to_cartesian(m, sa);
    const double value = f(p);
    return MeanValuePoint{std::move(sa), std::move(p), value};
  };

  if (target_avg < fmin - tol || target_avg > fmax + tol) {
    throw BracketingFailure("mean_value_point: net range [" + std::to_string(fmin) + ", " + std::to_string(fmax) +
                            "] does not bracket " + std::to_string(target_avg));
  }
  if (fmin - target_avg >= 0.0) return make_result(amin);
  if (fmax - target_avg <= 0.0) return make_result(amax);

  std::vector<double> lo_end = amin;
  std::vector<double> hi_end = amax;
  if (!anchor.empty()) {
    std::vector<double> a(anchor.begin(), anchor.end());
    for (std::size_t j = 0; j < dim; ++j) a[j] = std::clamp(a[j], box[j].lo, box[j].hi);
    const double fa = eval_at(a);
    if (std::abs(fa - target_avg) <= 1e-15 * std::max(1.0, std::abs(target_avg))) return make_result(a);
    const bool above = fa > target_avg;
    // metric weight for each angle: product of sines of the preceding colatitudes
    std::vector<double> scale(dim, 1.0);
    for (std::size_t j = 1; j < dim; ++j) scale[j] = scale[j - 1] * std::max(std::sin(a[j - 1]), 1e-12);

    // Walk from the anchor along the steepest descent (or ascent) direction
    // until f crosses target_avg; this lands near the closest level-set point.
    double diam2 = 0.0;
    for (std::size_t j = 0; j < dim; ++j) diam2 += std::pow(scale[j] * box[j].width(), 2);
    const double diam = std::sqrt(diam2);
    std::vector<double> dir(dim);
    double dir_norm = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double hstep = 1e-7 * box[j].width();
      std::vector<double> p = a;
      std::vector<double> q = a;
      p[j] = std::min(a[j] + hstep, box[j].hi);
      q[j] = std::max(a[j] - hstep, box[j].lo);
      const double grad = (eval_at(p) - eval_at(q)) / (p[j] - q[j]);
      dir[j] = (above ? -grad : grad) / (scale[j] * scale[j]);
      dir_norm += std::pow(scale[j] * dir[j], 2);
    }
    dir_norm = std::sqrt(dir_norm);
    bool bracketed = false;
    if (dir_norm > 0.0 && std::isfinite(dir_norm)) {
      for (double& d : dir) d /= dir_norm;  // unit metric speed
      std::vector<double> prev = a;
      for (double t = 1e-3 * diam; t <= 2.0 * diam; t *= 2.0) {
        std::vector<double> p(dim);
        bool clipped = false;
        for (std::size_t j = 0; j < dim; ++j) {
          p[j] = a[j] + t * dir[j];
          if (p[j] < box[j].lo || p[j] > box[j].hi) clipped = true;
          p[j] = std::clamp(p[j], box[j].lo, box[j].hi);
        }
        const double fp = eval_at(p);
        if (above ? fp <= target_avg : fp >= target_avg) {
          lo_end = above ? p : prev;
          hi_end = above ? prev : p;
          bracketed = true;
          break;
        }
        if (clipped) break;
        prev = std::move(p);
      }
    }
    if (!bracketed) {
      // nearest net point on the other side of target_avg
      double best_d = std::numeric_limits<double>::infinity();
      const std::vector<double>* partner = nullptr;
      for (std::size_t i = 0; i < net.size(); ++i) {
        if (above ? net_values[i] >= target_avg : net_values[i] <= target_avg) continue;
        double d = 0.0;
        for (std::size_t j = 0; j < dim; ++j) d += std::pow(scale[j] * (net[i][j] - a[j]), 2);
        if (d < best_d) {
          best_d = d;
          partner = &net[i];
        }
      }
      if (partner != nullptr) {
        lo_end = above ? *partner : a;
        hi_end = above ? a : *partner;
      }
    }
  }

  // g(s) = f(path(s)) - target with g(0) < 0 < g(1)
  double s_lo = 0.0;
  double s_hi = 1.0;
  std::vector<double> best = lo_end;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    const double s = 0.5 * (s_lo + s_hi);
    for (std::size_t j = 0; j < dim; ++j) angles[j] = lo_end[j] + s * (hi_end[j] - lo_end[j]);
    const double g = eval_at(angles) - target_avg;
    if (std::abs(g) < best_gap) {
      best_gap = std::abs(g);
      best = angles;
    }
    if (best_gap <= 1e-15 * std::max(1.0, std::abs(target_avg)) || s_hi - s_lo < 1e-17) break;
    (g < 0.0 ? s_lo : s_hi) = s;
  }
  if (best_gap > tol) {
    throw BracketingFailure("mean_value_point: bisection stalled (discontinuous f?)");
  }
  return make_result(best);
}

}  // namespace spheremix
