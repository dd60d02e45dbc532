#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "spheremix/quadrature.hpp"
#include "spheremix/sphere_geometry.hpp"
#include "spheremix/targets.hpp"
#include "spheremix/vmf.hpp"

namespace spheremix {

/// How the representative point of a block was chosen.
enum class BlockMode {
  kMeanValue,  ///< f(y_k) equals the block average
  kFallback,   ///< bracketing failed; block center with renormalized weight
  kDropped,    ///< block integral below the drop threshold
};

const char* to_string(BlockMode mode);

struct ConstructionOptions {
  /// Gauss nodes per angle for a block of angular width pi/8; scaled up for wider blocks.
  int block_order = 10;
  /// Blocks with integral below drop_threshold * omega_m(U_k) / omega_m are discarded.
  double drop_threshold = 1e-14;
  unsigned threads = 0;
};

struct Construction {
  VmfMixture mixture;
  std::vector<BlockMode> modes;          ///< one per partition block
  std::vector<double> block_integrals;   ///< int_{U_k} f, one per block
  std::vector<std::size_t> block_of_component;
  double integral_total = 0.0;           ///< sum of all block integrals before renormalization

  std::size_t count(BlockMode mode) const;
};

/// One component per retained block: mean at the mean-value point of f on
/// the block, concentration n, weight = block integral / total.
/// Throws DomainError when every block is dropped.
Construction construct_mixture(const TargetDensity& f, double n, const SphericalPartition& partition,
                               const ConstructionOptions& options = {});

struct SupErrorEstimate {
  double error = 0.0;
  std::size_t argmax = 0;
  std::vector<double> point;
};

/// max over the grid of |f(x) - mixture(x)|.
SupErrorEstimate estimate_sup_error(const TargetDensity& f, const VmfMixture& mix, const SupGrid& grid,
                                    unsigned threads = 0);

struct ApproximationConfig {
  double delta = 1e-2;
  double initial_n = 4.0;
  double n_growth = 2.0;
  double max_n = 512.0;
  std::vector<int> initial_levels;  ///< empty: 8 arcs for m = 1, (4, ..., 4, 8) otherwise
  double refinement = 1.4142135623730951;  ///< per-angle level growth per refinement step
  /// Partitions never exceed this; the last refinement step fills the budget.
  std::size_t max_blocks = 20'000;
  int sup_resolution = 0;         ///< 0: 8192 for m = 1, 20000 otherwise
  int diagnostic_resolution = 0;  ///< grid for the two stage terms; 0: 1024 for m = 1, 2000 otherwise
  std::vector<int> convolution_orders;  ///< empty: default_sphere_orders(m)
  int max_stages = 200;
  PartitionMode partition_mode = PartitionMode::kGraded;
  double sine_floor = 0.3;
  ConstructionOptions construction;
  unsigned threads = 0;

  void validate() const;
};

struct StageRecord {
  int stage = 0;
  double n = 0.0;
  std::vector<int> levels;
  std::size_t blocks = 0;
  std::size_t components = 0;
  std::size_t fallbacks = 0;
  double sup_error = 0.0;
  double convolution_term = 0.0;     ///< max |f - K_n * f| on the diagnostic grid
  double discretization_term = 0.0;  ///< max |mixture - K_n * f| on the diagnostic grid
  bool accepted = false;             ///< improved on every earlier stage
};

struct ApproximationReport {
  std::string target;
  int m = 2;
  double delta = 0.0;
  bool converged = false;
  double n = 0.0;
  std::vector<int> levels;
  VmfMixture mixture;
  SphericalPartition partition;
  std::vector<BlockMode> block_modes;
  double sup_error = 0.0;
  std::vector<double> sup_error_point;
  double convolution_error = 0.0;
  double discretization_error = 0.0;
  std::string grid_kind;
  std::size_t grid_points = 0;
  double mesh_norm = 0.0;
  std::vector<StageRecord> history;
  std::string disclaimer;
};

/// Alternating search: at each concentration n the partition is refined until
/// the discretization term reaches delta/2 (or stops improving, or hits
/// max_blocks), then n grows. At the largest n refinement continues while it
/// helps. Stops once the grid sup error is below delta.
/// When the budget runs out the best stage is returned with converged = false.
ApproximationReport approximate(const TargetDensity& f, const ApproximationConfig& config);

struct StudyOptions {
  int grid_resolution = 0;  ///< 0: 1024 for m = 1, 2000 otherwise
  std::vector<int> convolution_orders;
  ConstructionOptions construction;
  PartitionMode partition_mode = PartitionMode::kUniform;
  double sine_floor = 0.3;
  unsigned threads = 0;
};

struct StudyRow {
  double n = 0.0;
  std::vector<int> levels;
  std::size_t blocks = 0;
  double sup_error = 0.0;
  double convolution_term = 0.0;
  double discretization_term = 0.0;
};

/// Every (n, partition) pair, all three errors on one fixed grid.
std::vector<StudyRow> convergence_study(const TargetDensity& f, std::span<const double> ns,
                                        const std::vector<std::vector<int>>& partition_schedule,
                                        const StudyOptions& options = {});

/// Levels scaled by factor^step, rounded, each at least 1.
std::vector<int> scaled_levels(std::span<const int> base, double factor, int step);

}  // namespace spheremix
