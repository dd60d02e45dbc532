#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace spheremix {

/// A point on S^m stored by its m+1 ambient coordinates.
class UnitVector {
 public:
  /// Normalizes `coords`. Throws DomainError for a zero, non-finite or
  /// too-short (fewer than 2 coordinates) vector.
  explicit UnitVector(std::vector<double> coords);
  UnitVector(std::initializer_list<double> coords) : UnitVector(std::vector<double>(coords)) {}

  /// Sphere dimension m (one less than the coordinate count).
  int m() const { return static_cast<int>(coords_.size()) - 1; }
  std::size_t size() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }
  operator std::span<const double>() const { return coords_; }  // NOLINT(google-explicit-constructor)
  const std::vector<double>& vector() const { return coords_; }

  /// North pole e_{m+1}.
  static UnitVector north_pole(int m);

 private:
  std::vector<double> coords_;
};

double dot(std::span<const double> a, std::span<const double> b);
/// Great-circle distance between two unit vectors.
double geodesic_distance(std::span<const double> a, std::span<const double> b);

/// Function on S^m evaluated at ambient coordinates. `concurrent_safe`
/// declares that `eval` may be called from several threads at once.
struct SphereFunction {
  std::function<double(std::span<const double>)> eval;
  bool concurrent_safe = false;

  double operator()(std::span<const double> x) const { return eval(x); }
};

/// Colatitudes theta_1..theta_{m-1} in [0, pi] and azimuth phi in [0, 2 pi).
/// The last ambient coordinate is cos(theta_1); for m = 1 only phi is used.
struct SphericalAngles {
  std::vector<double> thetas;
  double phi = 0.0;
};

UnitVector spherical_to_cartesian(int m, const SphericalAngles& angles);
/// Writes the point into `out` (size m+1) without allocating.
void spherical_to_cartesian(int m, std::span<const double> thetas, double phi, std::span<double> out);
/// Inverse map; at coordinate singularities the undetermined angles are 0.
SphericalAngles cartesian_to_spherical(std::span<const double> x);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double v) const { return lo <= v && v <= hi; }
};

/// Product of angle intervals: m-1 colatitude intervals followed by the azimuth interval.
struct CoordinateBlock {
  std::vector<Interval> intervals;

  bool contains(const SphericalAngles& angles) const;
};

struct SphericalPartition {
  int m = 1;
  std::vector<CoordinateBlock> blocks;
  std::vector<double> measures;

  std::size_t size() const { return blocks.size(); }
  double total_measure() const;
};

enum class PartitionMode {
  kUniform,          ///< equal angle steps in every coordinate
  kMeasureBalanced,  ///< theta_1 cut at arccos-equispaced points
  kGraded,           ///< theta_1 cut equispaced in the integral of max(sin t, sine_floor)
};

struct PartitionOptions {
  PartitionMode mode = PartitionMode::kUniform;
  std::size_t max_blocks = 4'000'000;
  double sine_floor = 0.5;  ///< kGraded only; 1 gives uniform cuts, 0 balanced ones
};

/// Tensor grid of coordinate blocks; `levels` holds one subdivision count per
/// angle (theta_1..theta_{m-1}, phi). Throws ResourceError above `max_blocks`.
SphericalPartition build_partition(int m, std::span<const int> levels, const PartitionOptions& options = {});

/// Exact surface measure of a coordinate block.
double block_measure(int m, const CoordinateBlock& block);

/// Image of the per-interval midpoints.
UnitVector block_center(int m, const CoordinateBlock& block);

/// Colatitude intervals touching a pole are shrunk by this many radians
/// when choosing representative points.
inline constexpr double kPoleNudge = 1e-9;

struct MeanValuePoint {
  SphericalAngles angles;
  UnitVector point;
  double value;  ///< f(point)
};

/// Finds y in the block with f(y) = target_avg (to 1e-9 * max(1, target_avg))
/// by bisection in angle space. Without an anchor the segment joins the argmin
/// and argmax of f over a low-discrepancy net of 64*m points. With an anchor
/// (block angles, e.g. the mass barycenter) the search first walks from the
/// anchor along the gradient of f, then toward the nearest net point on the
/// other side of target_avg, so y stays close to the anchor.
/// Throws BracketingFailure when the net values do not bracket target_avg.
MeanValuePoint mean_value_point(int m, const CoordinateBlock& block, const SphereFunction& f,
                                double target_avg, std::span<const double> anchor = {});

}  // namespace spheremix
