#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "loopscope/manifolds.hpp"
#include "loopscope/parallel.hpp"

namespace loopscope {

// Raw time interval [t0, tf] in seconds that normalized time [0, 1] maps to.
struct TimeSpan {
  double start = 0.0;
  double end = 1.0;

  double duration() const { return end - start; }
};

// Time-ordered samples of a path on one manifold, over normalized time [0, 1].
// Immutable after construction.
class Trajectory {
 public:
  // times must be strictly increasing with times.front() == 0 and
  // times.back() == 1; at least 2 samples, all of one variant, compatible
  // with the metric. Throws ConfigError / MetricMismatchError otherwise.
  Trajectory(std::vector<double> times, std::vector<ManifoldPoint> points, MetricSpec metric,
             TimeSpan raw_span = {});

  // Normalizes strictly increasing raw timestamps (seconds) onto [0, 1].
  static Trajectory from_raw_times(std::span<const double> seconds, std::vector<ManifoldPoint> points,
                                   MetricSpec metric);

  std::size_t size() const { return times_.size(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<ManifoldPoint>& points() const { return points_; }
  const MetricSpec& metric() const { return metric_; }
  const TimeSpan& raw_span() const { return raw_span_; }

  // Same samples measured with another metric.
  Trajectory with_metric(MetricSpec metric) const;

  // Index of the sample nearest to t; exact midpoints resolve to the lower
  // index. Throws RangeError outside [0, 1].
  std::size_t nearest_index(double t) const;
  const ManifoldPoint& evaluate_at(double t) const { return points_[nearest_index(t)]; }

  // delta(xi(t), xi(t')) under the trajectory's metric.
  double pairwise_distance(double t, double t_prime) const;

  // Conversions between raw seconds and normalized time.
  double normalized_duration(double seconds) const { return seconds / raw_span_.duration(); }
  double seconds_duration(double normalized) const { return normalized * raw_span_.duration(); }
  double raw_time(double normalized) const { return raw_span_.start + normalized * raw_span_.duration(); }

 private:
  std::vector<double> times_;
  std::vector<ManifoldPoint> points_;
  MetricSpec metric_;
  TimeSpan raw_span_;
};

// Trajectory points flattened into contiguous arrays for repeated metric
// evaluation. distance(i, j) is bit-identical to loopscope::distance on the
// original points.
class PreparedPoints {
 public:
  explicit PreparedPoints(const Trajectory& trajectory);

  std::size_t size() const { return size_; }
  double distance(std::size_t i, std::size_t j) const;

  // Coordinates usable for spatial hashing, with the scale that turns a
  // metric radius into an embedding radius (distance >= scale * euclidean
  // distance between embeddings). Empty when the metric has no such bound.
  std::size_t embedding_dim() const { return embedding_dim_; }
  const double* embedding(std::size_t i) const { return embedding_.data() + i * embedding_dim_; }
  double embedding_scale() const { return embedding_scale_; }

 private:
  MetricSpec metric_;
  std::size_t size_ = 0;
  std::size_t stride_ = 0;  // doubles per point in data_
  std::vector<double> data_;
  std::size_t embedding_dim_ = 0;
  double embedding_scale_ = 1.0;
  std::vector<double> embedding_;
};

// Dense N x N grid of pairwise distances over uniform grid times i / (N - 1),
// with the gamma-sublevel mask. Row index is t, column index is t'.
class DistanceField {
 public:
  // Builds from an explicit row-major N x N value grid (must be symmetric,
  // non-negative, zero diagonal). Intended for fixtures and custom inputs.
  static DistanceField from_values(std::vector<double> values, std::size_t resolution, double gamma);

  std::size_t resolution() const { return n_; }
  double gamma() const { return gamma_; }
  const std::vector<double>& times() const { return times_; }
  std::span<const double> values() const { return values_; }
  std::span<const std::uint8_t> mask() const { return mask_; }

  double value(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  bool in_mask(std::size_t i, std::size_t j) const { return mask_[i * n_ + j] != 0; }

  // Width of one grid cell when the field tiles [0, 1]^2.
  double cell_width() const { return 1.0 / static_cast<double>(n_); }
  // Nearest grid row for a normalized time. Throws RangeError outside [0, 1].
  std::size_t index_for_time(double t) const;

  // Same values, new threshold.
  DistanceField with_gamma(double gamma) const;

  std::size_t mask_popcount() const;

 private:
  friend DistanceField build_distance_field(const Trajectory&, double, std::size_t, std::size_t);
  DistanceField(std::size_t n, std::vector<double> values, double gamma);

  std::size_t n_;
  std::vector<double> times_;
  std::vector<double> values_;
  double gamma_;
  std::vector<std::uint8_t> mask_;
};

// Default grid side: min(number of samples, 2048).
std::size_t default_resolution(const Trajectory& trajectory);

// Evaluates pi(t_i, t_j) on the uniform grid by nearest-sample lookup. Only
// the upper triangle is computed; it is mirrored. Output is independent of
// the worker count. Throws ConfigError for resolution < 2 or gamma < 0.
DistanceField build_distance_field(const Trajectory& trajectory, double gamma, std::size_t resolution,
                                   std::size_t workers = default_worker_count());

}  // namespace loopscope
