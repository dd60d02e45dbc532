// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. Exit status is nonzero if any criterion fails.
//
//   spheremix_acceptance            all criteria
//   spheremix_acceptance 3 7        selected criteria

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spheremix/approximator.hpp"
#include "spheremix/quadrature.hpp"
#include "spheremix/special_functions.hpp"
#include "spheremix/spectral.hpp"
#include "spheremix/targets.hpp"
#include "spheremix/vmf.hpp"

using namespace spheremix;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the first few failures and a summary metric.
class Checker {
 public:
  void require(bool ok, const std::string& what) {
    if (ok) return;
    pass_ = false;
    if (++failures_ <= 5) failures_text_ += (failures_text_.empty() ? "" : "; ") + what;
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : " ") + s; }
  Outcome outcome() const {
    std::string d = notes_;
    if (!pass_) d += " | " + std::to_string(failures_) + " failure(s): " + failures_text_;
    return {pass_, d};
  }

 private:
  bool pass_ = true;
  int failures_ = 0;
  std::string failures_text_;
  std::string notes_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::vector<double> north(int m) {
  std::vector<double> v(static_cast<std::size_t>(m) + 1, 0.0);
  v.back() = 1.0;
  return v;
}

Outcome criterion1() {
  Checker c;
  double worst = 0.0;
  for (int m : {1, 2, 3, 5}) {
    for (double n : {0.5, 1.0, 10.0, 100.0, 1000.0}) {
      const double dev = std::abs(funk_hecke_coefficient(m, VmfKernel(m, n).zonal(), 0) - 1.0);
      worst = std::max(worst, dev);
      c.require(dev <= 1e-8, "m=" + std::to_string(m) + " n=" + fmt(n) + " |a_0-1|=" + fmt(dev));
    }
  }
  c.note("max |a_0 - 1| = " + fmt(worst));
  return c.outcome();
}

Outcome criterion2() {
  Checker c;
  double worst_ratio = 0.0;
  for (double rho : {-0.5, 0.0, 0.5}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double n = 1.0; n <= 256.0; n *= 2.0) {
      const VmfKernel k(2, n);
      const double tail = condition2_tail(k, rho);
      const double log_bound = log_tail_bound(k, rho, 0.5 * (1.0 - rho));
      const std::string at = "rho=" + fmt(rho) + " n=" + fmt(n);
      c.require(tail < prev, at + " tail not decreasing");
      c.require(std::log(tail) <= log_bound, at + " tail above bound");
      worst_ratio = std::max(worst_ratio, std::log(tail) - log_bound);
      prev = tail;
    }
  }
  c.note("max log(tail/bound) = " + fmt(worst_ratio));
  return c.outcome();
}

Outcome criterion3() {
  Checker c;
  const int kmax = 8;
  double worst = 0.0;
  for (int m : {1, 2, 3}) {
    const auto rule = sphere_rule(m, default_sphere_orders(m));
    const auto grid = sup_grid(m, m == 1 ? 64 : (m == 2 ? 48 : 12));
    std::vector<double> e(static_cast<std::size_t>(m) + 1);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::cos(1.7 * static_cast<double>(i) + 0.3);
    const UnitVector pole(e);
    for (double n : {1.0, 10.0, 50.0}) {
      const auto kernel = VmfKernel(m, n).zonal();
      const SphericalConvolver conv(m, kernel, rule);
      const auto a = funk_hecke_coefficients(m, kernel, kmax);
      for (int k = 0; k <= kmax; ++k) {
        // Y_k(x) = Q_k(<x, e>) / Q_k(1)
        const SphereFunction y{[&](std::span<const double> x) {
                                 double r[kmax + 1];
                                 gegenbauer_ratio_all(m, std::clamp(dot(x, pole.vector()), -1.0, 1.0),
                                                      std::span<double>(r, static_cast<std::size_t>(k) + 1));
                                 return r[k];
                               },
                               true};
        double dev = 0.0;
        double ymax = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
          const auto x = grid.point(i);
          const double yx = y(x);
          ymax = std::max(ymax, std::abs(yx));
          dev = std::max(dev, std::abs(conv(y, x) - a.values[static_cast<std::size_t>(k)] * yx));
        }
        // |Y_k| attains its maximum 1 at the pole
        ymax = std::max(ymax, 1.0);
        worst = std::max(worst, dev / ymax);
        c.require(dev <= 1e-6 * ymax,
                  "m=" + std::to_string(m) + " n=" + fmt(n) + " k=" + std::to_string(k) + " dev=" + fmt(dev));
      }
    }
  }
  c.note("max |K*Y - a Y| / max|Y| = " + fmt(worst));
  return c.outcome();
}

Outcome criterion4() {
  Checker c;
  double worst_mass = 0.0;
  for (int m = 1; m <= 5; ++m) {
    for (double kappa : {0.1, 1.0, 10.0, 100.0, 1000.0}) {
      // mean at the pole: the first colatitude carries the peak, theta_j only sin^{m-j}
      std::vector<int> orders;
      for (int j = 1; j < m; ++j) orders.push_back(2 * (m - j) + 6);
      orders.push_back(8);
      orders.front() = kappa > 200.0 ? 1024 : 256;
      if (m == 1) orders.front() = kappa > 200.0 ? 2048 : 512;
      const VmfMixture one(m, {{UnitVector(north(m)), kappa}}, {1.0});
      const double mass = sphere_rule(m, orders).integrate([&](std::span<const double> x) { return one.density(x); });
      worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
      c.require(std::abs(mass - 1.0) <= 1e-8, "m=" + std::to_string(m) + " kappa=" + fmt(kappa) + " mass=" +
                                                  fmt(mass));
    }
  }
  // generic orientation, default orders
  for (int m : {1, 2}) {
    for (double kappa : {0.1, 10.0, 100.0}) {
      const VmfComponent comp{suite_direction(m, 1), kappa};
      const double mass = sphere_rule(m, default_sphere_orders(m)).integrate([&](std::span<const double> x) {
        return std::exp(vmf_log_density(m, comp, x));
      });
      worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
      c.require(std::abs(mass - 1.0) <= 1e-8, "tilted m=" + std::to_string(m) + " kappa=" + fmt(kappa));
    }
  }
  double worst_rel = 0.0;
  for (double kappa : {1e-3, 0.1, 1.0, 5.0, 10.0, 100.0, 700.0, 1000.0}) {
    // log of kappa / (4 pi sinh kappa), stable for large kappa
    const double exact = std::log(kappa) - std::log(4.0 * kPi) - kappa - std::log1p(-std::exp(-2.0 * kappa)) +
                         std::log(2.0);
    const double rel = std::abs(std::expm1(log_norm_const(2, kappa) - exact));
    worst_rel = std::max(worst_rel, rel);
    c.require(rel <= 1e-10, "c_3 kappa=" + fmt(kappa) + " rel=" + fmt(rel));
  }
  c.note("max |mass - 1| = " + fmt(worst_mass) + ", max c_3 rel error = " + fmt(worst_rel));
  return c.outcome();
}

// Index of the block containing the angles, for product partitions.
class BlockLocator {
 public:
  explicit BlockLocator(const SphericalPartition& p) : m_(p.m) {
    cuts_.resize(static_cast<std::size_t>(m_));
    for (const auto& b : p.blocks) {
      for (std::size_t j = 0; j < b.intervals.size(); ++j) cuts_[j].insert(b.intervals[j].lo);
    }
    for (std::size_t k = 0; k < p.blocks.size(); ++k) {
      std::vector<std::size_t> key;
      for (std::size_t j = 0; j < p.blocks[k].intervals.size(); ++j) {
        key.push_back(static_cast<std::size_t>(std::distance(cuts_[j].begin(), cuts_[j].find(p.blocks[k].intervals[j].lo))));
      }
      index_[key] = k;
    }
  }

  std::size_t operator()(const SphericalAngles& a) const {
    std::vector<std::size_t> key;
    for (int j = 0; j < m_; ++j) {
      const double v = j + 1 < m_ ? a.thetas[static_cast<std::size_t>(j)] : a.phi;
      const auto& cuts = cuts_[static_cast<std::size_t>(j)];
      auto it = cuts.upper_bound(v);
      key.push_back(static_cast<std::size_t>(std::distance(cuts.begin(), it)) - 1);
    }
    return index_.at(key);
  }

 private:
  int m_;
  std::vector<std::set<double>> cuts_;
  std::map<std::vector<std::size_t>, std::size_t> index_;
};

Outcome criterion5() {
  Checker c;
  const std::map<int, std::vector<std::vector<int>>> configs = {
      {1, {{1}, {7}, {64}, {1000}}},
      {2, {{1, 1}, {2, 4}, {9, 17}, {100, 200}}},
      {3, {{1, 1, 1}, {2, 3, 4}, {10, 10, 20}, {30, 40, 50}}},
      {4, {{1, 1, 1, 1}, {2, 2, 2, 3}, {5, 6, 7, 8}, {12, 12, 12, 24}}},
  };
  double worst_rel = 0.0;
  for (const auto& [m, list] : configs) {
    const double omega = surface_measure(m);
    for (const auto& levels : list) {
      for (auto mode : {PartitionMode::kUniform, PartitionMode::kMeasureBalanced, PartitionMode::kGraded}) {
        const auto p = build_partition(m, levels, {mode});
        const double sum = std::accumulate(p.measures.begin(), p.measures.end(), 0.0);
        const double rel = std::abs(sum - omega) / omega;
        worst_rel = std::max(worst_rel, rel);
        c.require(rel <= 1e-10, "m=" + std::to_string(m) + " rel=" + fmt(rel));
        c.require(p.size() == static_cast<std::size_t>(std::accumulate(levels.begin(), levels.end(), 1,
                                                                       std::multiplies<>())),
                  "block count");
      }
    }
  }

  const std::size_t samples = 1'000'000;
  double worst_z = 0.0;
  std::mt19937_64 rng(20240607);
  std::normal_distribution<double> gauss;
  const std::vector<std::pair<int, std::vector<int>>> mc = {{1, {7}}, {2, {3, 5}}, {3, {2, 3, 4}}, {4, {2, 2, 2, 3}}};
  for (const auto& [m, levels] : mc) {
    for (auto mode : {PartitionMode::kUniform, PartitionMode::kGraded}) {
      const auto p = build_partition(m, levels, {mode});
      const BlockLocator locate(p);
      std::vector<std::size_t> counts(p.size(), 0);
      std::vector<double> x(static_cast<std::size_t>(m) + 1);
      for (std::size_t s = 0; s < samples; ++s) {
        for (double& v : x) v = gauss(rng);
        ++counts[locate(cartesian_to_spherical(UnitVector(x).vector()))];
      }
      const double omega = surface_measure(m);
      for (std::size_t k = 0; k < p.size(); ++k) {
        const double prob = p.measures[k] / omega;
        const double se = std::sqrt(static_cast<double>(samples) * prob * (1.0 - prob));
        const double z = std::abs(static_cast<double>(counts[k]) - static_cast<double>(samples) * prob) / se;
        worst_z = std::max(worst_z, z);
        c.require(z <= 4.0, "occupancy m=" + std::to_string(m) + " block " + std::to_string(k) + " z=" + fmt(z));
      }
    }
  }
  c.note("max relative measure error = " + fmt(worst_rel) + ", max occupancy z = " + fmt(worst_z));
  return c.outcome();
}

double grid_sup(const TargetDensity& f, const SupGrid& grid) {
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) s = std::max(s, f(grid.point(i)));
  return s;
}

Outcome criterion6() {
  Checker c;
  for (int m : {1, 2}) {
    const SupGrid grid = sup_grid(m, m == 1 ? 8192 : 20000);
    for (const auto& name : standard_target_names()) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto f = standard_target(name, m);
      ApproximationConfig cfg;
      cfg.delta = 0.05 * grid_sup(f, grid);
      const auto r = approximate(f, cfg);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const std::string at = "m=" + std::to_string(m) + " " + name;
      c.require(r.converged && r.sup_error <= cfg.delta, at + " sup=" + fmt(r.sup_error) + " delta=" + fmt(cfg.delta));
      c.require(r.n <= 512.0 && r.mixture.size() <= 20000, at + " over budget");
      const double wsum = std::accumulate(r.mixture.weights().begin(), r.mixture.weights().end(), 0.0);
      c.require(std::abs(wsum - 1.0) <= 1e-12, at + " weights sum " + fmt(wsum));
      c.require(std::all_of(r.mixture.weights().begin(), r.mixture.weights().end(), [](double w) { return w > 0.0; }),
                at + " non-positive weight");
      double prev = std::numeric_limits<double>::infinity();
      for (const auto& s : r.history) {
        if (!s.accepted) continue;
        c.require(s.sup_error <= prev, at + " accepted history increases");
        prev = s.sup_error;
      }
      c.note(at + ": " + fmt(r.sup_error / cfg.delta * 0.05) + "*sup_f n=" + fmt(r.n) +
             " N=" + std::to_string(r.mixture.size()) + " (" + fmt(secs) + "s);");
    }
  }
  return c.outcome();
}

// Circle version of a suite target, built from its defining formula.
std::function<double(double)> circle_target(const std::string& name) {
  const auto angle = [](int i) { return std::atan2(std::cos(2.3 * i + 1.3), std::cos(2.3 * i + 0.4)); };
  const auto mixture = [](std::vector<oracle::CircleComponent> comps) {
    const auto mix = std::make_shared<oracle::CircleMixture>(std::move(comps));
    return std::function<double(double)>([mix](double phi) { return (*mix)(phi); });
  };
  if (name == "uniform") return [](double) { return 1.0 / (2.0 * kPi); };
  if (name == "vmf2") return mixture({{angle(0), 2.0, 1.0}});
  if (name == "vmf10") return mixture({{angle(0), 10.0, 1.0}});
  if (name == "mix2") return mixture({{angle(0), 5.0, 0.6}, {angle(1), 5.0, 0.4}});
  if (name == "mix3") return mixture({{angle(0), 4.0, 0.5}, {angle(1), 6.0, 0.3}, {angle(2), 8.0, 0.2}});
  // sqip: exp(2 cos^2(phi - e)) normalized by a dense trapezoid sum
  const double e = angle(0);
  const auto g = oracle::circle_grid(100'000);
  double z = 0.0;
  for (double phi : g.phi) z += g.weight * std::exp(2.0 * std::pow(std::cos(phi - e), 2));
  return [e, z](double phi) { return std::exp(2.0 * std::pow(std::cos(phi - e), 2)) / z; };
}

bool close(double engine, double reference, double rel) {
  // values at rounding level (uniform target convolution term) compare absolutely
  return std::abs(engine - reference) <= rel * std::max(std::abs(engine), std::abs(reference)) + 1e-12;
}

Outcome criterion7() {
  Checker c;
  const auto dense = oracle::circle_grid(100'000);
  const SupGrid engine_grid = sup_grid(1, 8192);
  const SupGrid diag = sup_grid(1, 1024);
  double worst = 0.0;
  for (const auto& name : standard_target_names()) {
    const auto f = standard_target(name, 1);
    const auto ref = circle_target(name);
    ApproximationConfig cfg;
    cfg.delta = 0.05 * grid_sup(f, engine_grid);
    const auto r = approximate(f, cfg);

    std::vector<oracle::CircleComponent> comps;
    for (std::size_t h = 0; h < r.mixture.size(); ++h) {
      const auto mu = r.mixture.mean(h);
      comps.push_back({std::atan2(mu[1], mu[0]), r.mixture.kappa(h), r.mixture.weight(h)});
    }
    const oracle::CircleMixture mix(std::move(comps));

    std::vector<double> f_dense(dense.phi.size());
    double sup_ref = 0.0;
    for (std::size_t i = 0; i < dense.phi.size(); ++i) {
      f_dense[i] = ref(dense.phi[i]);
      sup_ref = std::max(sup_ref, std::abs(f_dense[i] - mix(dense.phi[i])));
    }
    double conv_ref = 0.0;
    double disc_ref = 0.0;
    for (std::size_t i = 0; i < diag.size(); ++i) {
      const auto x = diag.point(i);
      const double phi = std::atan2(x[1], x[0]);
      const double kf = oracle::circle_convolution(dense, f_dense, r.n, phi);
      conv_ref = std::max(conv_ref, std::abs(ref(phi) - kf));
      disc_ref = std::max(disc_ref, std::abs(mix(phi) - kf));
    }
    const auto rel = [](double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); };
    const double d_sup = rel(r.sup_error, sup_ref);
    worst = std::max(worst, d_sup);
    c.require(close(r.sup_error, sup_ref, 0.02), name + " sup " + fmt(r.sup_error) + " vs " + fmt(sup_ref));
    c.require(close(r.convolution_error, conv_ref, 0.02),
              name + " conv " + fmt(r.convolution_error) + " vs " + fmt(conv_ref));
    c.require(close(r.discretization_error, disc_ref, 0.02),
              name + " disc " + fmt(r.discretization_error) + " vs " + fmt(disc_ref));
    c.note(name + ": sup " + fmt(r.sup_error) + "/" + fmt(sup_ref) + ";");
  }
  c.note("max relative sup gap = " + fmt(worst));
  return c.outcome();
}

Outcome criterion8() {
  Checker c;
  const std::vector<double> ns = {4.0, 16.0, 64.0};
  const std::vector<std::vector<int>> schedule = {{4, 8}, {8, 16}, {16, 32}, {32, 64}};
  for (const auto& name : standard_target_names()) {
    const auto f = standard_target(name, 2);
    const auto rows = convergence_study(f, ns, schedule);
    const std::size_t per_n = schedule.size();
    for (std::size_t i = 0; i + 1 < ns.size(); ++i) {
      const double a = rows[i * per_n].convolution_term;
      const double b = rows[(i + 1) * per_n].convolution_term;
      c.require(b <= a + 1e-12, name + " conv term rises n=" + fmt(ns[i + 1]) + ": " + fmt(a) + " -> " + fmt(b));
    }
    for (std::size_t i = 0; i < ns.size(); ++i) {
      for (std::size_t j = 0; j + 1 < per_n; ++j) {
        const double a = rows[i * per_n + j].discretization_term;
        const double b = rows[i * per_n + j + 1].discretization_term;
        c.require(b <= a + 1e-12, name + " disc term rises at n=" + fmt(ns[i]) + " step " + std::to_string(j + 1) +
                                      ": " + fmt(a) + " -> " + fmt(b));
      }
    }
    const auto& last = rows.back();
    c.note(name + ": conv " + fmt(rows[0].convolution_term) + "->" + fmt(last.convolution_term) + ", disc@64 " +
           fmt(rows[(ns.size() - 1) * per_n].discretization_term) + "->" + fmt(last.discretization_term) + ";");
  }
  return c.outcome();
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"a_0(K_n) = 1", criterion1},
      {"condition-2 tails", criterion2},
      {"Funk-Hecke identity", criterion3},
      {"vMF normalization", criterion4},
      {"partition exactness", criterion5},
      {"end-to-end approximation", criterion6},
      {"circle oracle equivalence", criterion7},
      {"stage decomposition", criterion8},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d: %s  %s [%.1fs] %s\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
