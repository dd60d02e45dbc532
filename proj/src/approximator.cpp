#include "spheremix/approximator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "spheremix/errors.hpp"
#include "spheremix/parallel.hpp"
#include "spheremix/special_functions.hpp"
#include "spheremix/spectral.hpp"

namespace spheremix {

namespace {

constexpr double kPi = std::numbers::pi;

unsigned f_threads(const TargetDensity& f, unsigned threads) { return f.f.concurrent_safe ? threads : 1u; }

std::vector<double> eval_on_grid(const TargetDensity& f, const SupGrid& grid, unsigned threads) {
  std::vector<double> out(grid.size());
  parallel_for(grid.size(), f_threads(f, threads), [&](std::size_t i) { out[i] = f(grid.point(i)); });
  return out;
}

std::vector<double> eval_on_grid(const VmfMixture& mix, const SupGrid& grid, unsigned threads) {
  std::vector<double> out(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) { out[i] = mix.density(grid.point(i)); });
  return out;
}

// (K_n * f) on every grid point; the kernel is the normalized-measure form of K_n.
std::vector<double> convolve_on_grid(const TargetDensity& f, double n, const SupGrid& grid,
                                     std::span<const int> orders, unsigned threads) {
  const SphericalConvolver conv(f.m, VmfKernel(f.m, n).zonal(), sphere_rule(f.m, orders));
  std::vector<double> out(grid.size());
  parallel_for(grid.size(), f_threads(f, threads), [&](std::size_t i) { out[i] = conv(f.f, grid.point(i)); });
  return out;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b, std::size_t* where = nullptr) {
  double worst = -1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    if (d > worst) {
      worst = d;
      if (where != nullptr) *where = i;
    }
  }
  return std::max(worst, 0.0);
}

std::vector<int> block_orders(const CoordinateBlock& block, int base) {
  std::vector<int> orders;
  for (const auto& iv : block.intervals) {
    const int scaled = static_cast<int>(std::ceil(base * iv.width() / (kPi / 8.0)));
    orders.push_back(std::clamp(scaled, base, 256));
  }
  return orders;
}

std::vector<int> default_levels(int m) {
  if (m == 1) return {8};
  std::vector<int> levels(static_cast<std::size_t>(m), 4);
  levels.back() = 8;
  return levels;
}

std::size_t block_count(std::span<const int> levels) {
  double total = 1.0;
  for (int l : levels) total *= l;
  return total > 1e18 ? std::numeric_limits<std::size_t>::max() : static_cast<std::size_t>(total);
}

// Geometric refinement of base while it fits in max_blocks, closed by one
// partition that uses as much of the block budget as possible.
std::vector<std::vector<int>> level_schedule(std::span<const int> base, double factor, std::size_t max_blocks) {
  std::vector<std::vector<int>> out;
  for (int step = 0;; ++step) {
    auto levels = scaled_levels(base, factor, step);
    if (block_count(levels) > max_blocks) break;
    if (out.empty() || levels != out.back()) out.push_back(std::move(levels));
  }
  const double scale = std::pow(static_cast<double>(max_blocks) / static_cast<double>(block_count(base)),
                                1.0 / static_cast<double>(base.size()));
  std::vector<int> fill;
  for (int l : base) fill.push_back(std::max(1, static_cast<int>(std::floor(l * scale))));
  while (block_count(fill) > max_blocks) --*std::max_element(fill.begin(), fill.end());
  if (block_count(fill) > block_count(out.back())) out.push_back(std::move(fill));
  return out;
}

}  // namespace

const char* to_string(BlockMode mode) {
  switch (mode) {
    case BlockMode::kMeanValue:
      return "mean_value";
    case BlockMode::kFallback:
      return "fallback";
    case BlockMode::kDropped:
      return "dropped";
  }
  return "unknown";
}

std::size_t Construction::count(BlockMode mode) const {
  return static_cast<std::size_t>(std::count(modes.begin(), modes.end(), mode));
}

Construction construct_mixture(const TargetDensity& f, double n, const SphericalPartition& partition,
                               const ConstructionOptions& options) {
  const int m = partition.m;
  if (f.m != m) throw DomainError("construct_mixture: target and partition dimensions differ");
  if (!(n > 0.0)) throw DomainError("construct_mixture: n must be > 0");
  const std::size_t blocks = partition.size();
  const double omega = surface_measure(m);
  const unsigned threads = f_threads(f, options.threads);

  const auto dim = static_cast<std::size_t>(m);
  std::vector<double> integrals(blocks);
  std::vector<double> anchors(blocks * dim);  // angles of each block's mass barycenter
  parallel_for(blocks, threads, [&](std::size_t k) {
    const auto orders = block_orders(partition.blocks[k], options.block_order);
    const SphereRule rule = block_rule(m, partition.blocks[k], orders);
    std::vector<double> bary(dim + 1, 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const auto x = rule.point(i);
      const double w = rule.weights[i] * f(x);
      sum += w;
      for (std::size_t c = 0; c <= dim; ++c) bary[c] += w * x[c];
    }
    integrals[k] = sum;
    double norm = 0.0;
    for (double c : bary) norm += c * c;
    if (!(norm > 0.0)) bary = block_center(m, partition.blocks[k]).vector();
    const SphericalAngles a = cartesian_to_spherical(bary);
    std::copy(a.thetas.begin(), a.thetas.end(), anchors.begin() + static_cast<std::ptrdiff_t>(k * dim));
    anchors[k * dim + dim - 1] = a.phi;
  });

  std::vector<BlockMode> modes(blocks, BlockMode::kMeanValue);
  double total = 0.0;
  double kept = 0.0;
  for (std::size_t k = 0; k < blocks; ++k) {
    total += integrals[k];
    if (!(integrals[k] >= options.drop_threshold * partition.measures[k] / omega)) {
      modes[k] = BlockMode::kDropped;
    } else {
      kept += integrals[k];
    }
  }
  if (!(kept > 0.0)) throw DomainError("construct_mixture: every block has negligible mass");

  std::vector<std::optional<UnitVector>> points(blocks);
  parallel_for(blocks, threads, [&](std::size_t k) {
    if (modes[k] == BlockMode::kDropped) return;
    const double target_avg = integrals[k] / partition.measures[k];
    try {
      const std::span<const double> anchor(anchors.data() + k * dim, dim);
      points[k] = mean_value_point(m, partition.blocks[k], f.f, target_avg, anchor).point;
    } catch (const BracketingFailure&) {
      modes[k] = BlockMode::kFallback;
      points[k] = block_center(m, partition.blocks[k]);
    }
  });

  std::vector<VmfComponent> comps;
  std::vector<double> weights;
  std::vector<std::size_t> owner;
  for (std::size_t k = 0; k < blocks; ++k) {
    if (modes[k] == BlockMode::kDropped) continue;
    comps.push_back({*points[k], n});
    weights.push_back(integrals[k] / kept);
    owner.push_back(k);
  }
  // absorb the last ulp of rounding so the simplex constraint is exact to 1e-12
  double s = 0.0;
  for (double w : weights) s += w;
  for (double& w : weights) w /= s;

  return Construction{VmfMixture(m, std::move(comps), std::move(weights)), std::move(modes), std::move(integrals),
                      std::move(owner), total};
}

SupErrorEstimate estimate_sup_error(const TargetDensity& f, const VmfMixture& mix, const SupGrid& grid,
                                    unsigned threads) {
  if (f.m != mix.m() || grid.m != mix.m()) throw DomainError("estimate_sup_error: dimension mismatch");
  const auto fv = eval_on_grid(f, grid, threads);
  const auto mv = eval_on_grid(mix, grid, threads);
  SupErrorEstimate e;
  e.error = max_abs_diff(fv, mv, &e.argmax);
  const auto p = grid.point(e.argmax);
  e.point.assign(p.begin(), p.end());
  return e;
}

void ApproximationConfig::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("delta must be finite and > 0");
  if (!(initial_n > 0.0)) throw DomainError("initial_n must be > 0");
  if (!(n_growth > 1.0)) throw DomainError("n_growth must be > 1");
  if (!(refinement > 1.0)) throw DomainError("refinement must be > 1");
  if (!(max_n >= initial_n)) throw DomainError("max_n must be >= initial_n");
  if (max_stages < 1) throw DomainError("max_stages must be >= 1");
  if (!(sine_floor >= 0.0 && sine_floor <= 1.0)) throw DomainError("sine_floor must lie in [0, 1]");
  if (max_blocks < 1) throw DomainError("max_blocks must be >= 1");
}

std::vector<int> scaled_levels(std::span<const int> base, double factor, int step) {
  std::vector<int> out;
  const double scale = std::pow(factor, step);
  for (int l : base) out.push_back(std::max(1, static_cast<int>(std::lround(l * scale))));
  return out;
}

ApproximationReport approximate(const TargetDensity& f, const ApproximationConfig& config) {
  config.validate();
  if (!f.declared_continuous) throw DomainError("approximate: target must be declared continuous");
  const int m = f.m;
  const std::vector<int> base = config.initial_levels.empty() ? default_levels(m) : config.initial_levels;
  if (base.size() != static_cast<std::size_t>(m)) throw DomainError("approximate: need one initial level per angle");
  if (block_count(base) > config.max_blocks) throw DomainError("approximate: initial partition exceeds max_blocks");
  const auto conv_orders = config.convolution_orders.empty() ? default_sphere_orders(m) : config.convolution_orders;
  const unsigned threads = config.threads;

  const SupGrid grid = sup_grid(m, config.sup_resolution > 0 ? config.sup_resolution : (m == 1 ? 8192 : 20000));
  const SupGrid diag = sup_grid(
      m, config.diagnostic_resolution > 0 ? config.diagnostic_resolution : (m == 1 ? 1024 : 2000));
  const auto f_grid = eval_on_grid(f, grid, threads);
  const auto f_diag = eval_on_grid(f, diag, threads);
  PartitionOptions popts;
  popts.mode = config.partition_mode;
  popts.sine_floor = config.sine_floor;
  ConstructionOptions copts = config.construction;
  copts.threads = threads;

  struct Best {
    Construction construction;
    SphericalPartition partition;
    std::vector<int> levels;
    double n;
    double sup;
    std::size_t argmax;
    double conv;
    double disc;
  };
  std::optional<Best> best;
  std::vector<StageRecord> history;
  bool converged = false;
  const auto schedule = level_schedule(base, config.refinement, config.max_blocks);
  std::size_t step = 0;
  int stage = 0;

  for (double n = config.initial_n; n <= config.max_n * (1.0 + 1e-12) && !converged && stage < config.max_stages;
       n *= config.n_growth) {
    const bool last_n = n * config.n_growth > config.max_n * (1.0 + 1e-12);
    const auto conv_diag = convolve_on_grid(f, n, diag, conv_orders, threads);
    const double conv_term = max_abs_diff(f_diag, conv_diag);
    double prev_disc = std::numeric_limits<double>::infinity();
    for (;;) {
      const auto& levels = schedule[step];
      SphericalPartition partition = build_partition(m, levels, popts);
      Construction c = construct_mixture(f, n, partition, copts);
      const auto mix_grid = eval_on_grid(c.mixture, grid, threads);
      std::size_t argmax = 0;
      const double sup = max_abs_diff(f_grid, mix_grid, &argmax);
      const double disc = max_abs_diff(eval_on_grid(c.mixture, diag, threads), conv_diag);

      StageRecord rec;
      rec.stage = stage++;
      rec.n = n;
      rec.levels = levels;
      rec.blocks = partition.size();
      rec.components = c.mixture.size();
      rec.fallbacks = c.count(BlockMode::kFallback);
      rec.sup_error = sup;
      rec.convolution_term = conv_term;
      rec.discretization_term = disc;
      rec.accepted = !best || sup < best->sup;
      history.push_back(rec);
      if (rec.accepted) {
        best = Best{std::move(c), std::move(partition), levels, n, sup, argmax, conv_term, disc};
      }

      if (sup < config.delta) {
        converged = true;
        break;
      }
      if (stage >= config.max_stages) break;
      // discretization is good enough at this n, unless n cannot grow any more
      if (disc <= 0.5 * config.delta && !last_n) break;
      if (disc > 0.95 * prev_disc) break;      // refinement has stalled
      prev_disc = disc;
      if (step + 1 >= schedule.size()) break;
      ++step;
    }
  }

  const auto p = grid.point(best->argmax);
  ApproximationReport report{
      .target = f.name,
      .m = m,
      .delta = config.delta,
      .converged = converged,
      .n = best->n,
      .levels = best->levels,
      .mixture = best->construction.mixture,
      .partition = std::move(best->partition),
      .block_modes = best->construction.modes,
      .sup_error = best->sup,
      .sup_error_point = std::vector<double>(p.begin(), p.end()),
      .convolution_error = best->conv,
      .discretization_error = best->disc,
      .grid_kind = grid.kind,
      .grid_points = grid.size(),
      .mesh_norm = grid.mesh_norm,
      .history = std::move(history),
      .disclaimer =
          "sup_error is the maximum of |f - mixture| over a finite grid with the recorded mesh norm; "
          "between grid points the error is not bounded without a modulus of continuity for f",
  };
  return report;
}

std::vector<StudyRow> convergence_study(const TargetDensity& f, std::span<const double> ns,
                                        const std::vector<std::vector<int>>& partition_schedule,
                                        const StudyOptions& options) {
  const int m = f.m;
  const SupGrid grid = sup_grid(m, options.grid_resolution > 0 ? options.grid_resolution : (m == 1 ? 1024 : 2000));
  const auto conv_orders = options.convolution_orders.empty() ? default_sphere_orders(m) : options.convolution_orders;
  const auto f_grid = eval_on_grid(f, grid, options.threads);
  PartitionOptions popts;
  popts.mode = options.partition_mode;
  popts.sine_floor = options.sine_floor;
  ConstructionOptions copts = options.construction;
  copts.threads = options.threads;

  std::vector<StudyRow> rows;
  for (double n : ns) {
    const auto conv = convolve_on_grid(f, n, grid, conv_orders, options.threads);
    const double conv_term = max_abs_diff(f_grid, conv);
    for (const auto& levels : partition_schedule) {
      const SphericalPartition partition = build_partition(m, levels, popts);
      const Construction c = construct_mixture(f, n, partition, copts);
      const auto mix = eval_on_grid(c.mixture, grid, options.threads);
      rows.push_back(StudyRow{n, levels, partition.size(), max_abs_diff(f_grid, mix), conv_term,
                              max_abs_diff(mix, conv)});
    }
  }
  return rows;
}

}  // namespace spheremix
