#include "loopscope/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "loopscope/error.hpp"

namespace loopscope {

namespace {

bool point_finite(const ManifoldPoint& p) {
  if (const auto* e = std::get_if<EuclideanPoint>(&p)) {
    return std::all_of(e->coords.begin(), e->coords.end(), [](double x) { return std::isfinite(x); });
  }
  if (const auto* pose = std::get_if<RigidPose>(&p)) return pose->translation.allFinite();
  return true;  // torus and rotation validate on construction
}

}  // namespace

Trajectory::Trajectory(std::vector<double> times, std::vector<ManifoldPoint> points, MetricSpec metric,
                       TimeSpan raw_span)
    : times_(std::move(times)), points_(std::move(points)), metric_(metric), raw_span_(raw_span) {
  validate(metric_);
  if (times_.size() < 2) throw ConfigError("trajectory needs at least 2 samples");
  if (times_.size() != points_.size()) throw ConfigError("trajectory times and points differ in length");
  if (times_.front() != 0.0 || times_.back() != 1.0) {
    throw ConfigError("normalized trajectory times must start at 0 and end at 1");
  }
  for (std::size_t k = 1; k < times_.size(); ++k) {
    if (!(times_[k] > times_[k - 1])) throw ConfigError("trajectory times must be strictly increasing");
  }
  if (!(raw_span_.end > raw_span_.start) || !std::isfinite(raw_span_.start) || !std::isfinite(raw_span_.end)) {
    throw ConfigError("raw time span must be finite with end > start");
  }
  const std::size_t variant = points_.front().index();
  std::size_t dim = 0;
  if (const auto* e = std::get_if<EuclideanPoint>(&points_.front())) dim = e->coords.size();
  if (variant == 0 && dim == 0) throw ConfigError("euclidean points need at least one coordinate");
  for (const auto& p : points_) {
    if (p.index() != variant) throw MetricMismatchError("trajectory mixes point variants");
    if (!compatible(metric_, p)) throw MetricMismatchError(metric_name(metric_) + " cannot measure these points");
    if (!point_finite(p)) throw ConfigError("trajectory coordinates must be finite");
    if (variant == 0 && std::get<EuclideanPoint>(p).coords.size() != dim) {
      throw MetricMismatchError("euclidean points differ in dimension");
    }
  }
}

Trajectory Trajectory::from_raw_times(std::span<const double> seconds, std::vector<ManifoldPoint> points,
                                      MetricSpec metric) {
  if (seconds.size() < 2) throw ConfigError("trajectory needs at least 2 samples");
  for (double s : seconds) {
    if (!std::isfinite(s)) throw ConfigError("timestamps must be finite");
  }
  const TimeSpan span{seconds.front(), seconds.back()};
  if (!(span.end > span.start)) throw ConfigError("timestamps must be strictly increasing");
  std::vector<double> times(seconds.size());
  const double duration = span.duration();
  for (std::size_t k = 0; k < seconds.size(); ++k) times[k] = (seconds[k] - span.start) / duration;
  times.front() = 0.0;
  times.back() = 1.0;
  return Trajectory(std::move(times), std::move(points), metric, span);
}

Trajectory Trajectory::with_metric(MetricSpec metric) const {
  return Trajectory(times_, points_, metric, raw_span_);
}

std::size_t Trajectory::nearest_index(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw RangeError("time outside [0, 1]");
  const auto it = std::lower_bound(times_.begin(), times_.end(), t);
  const auto hi = static_cast<std::size_t>(it - times_.begin());
  if (hi == 0) return 0;
  if (hi == times_.size()) return times_.size() - 1;
  if (times_[hi] == t) return hi;
  const std::size_t lo = hi - 1;
  return (t - times_[lo] <= times_[hi] - t) ? lo : hi;
}

double Trajectory::pairwise_distance(double t, double t_prime) const {
  return distance(metric_, evaluate_at(t), evaluate_at(t_prime));
}

PreparedPoints::PreparedPoints(const Trajectory& trajectory)
    : metric_(trajectory.metric()), size_(trajectory.size()) {
  const auto& pts = trajectory.points();
  const auto& first = pts.front();
  switch (metric_.index()) {
    case 0:
      if (const auto* e = std::get_if<EuclideanPoint>(&first)) {
        stride_ = e->coords.size();
        data_.reserve(size_ * stride_);
        for (const auto& p : pts) {
          const auto& c = std::get<EuclideanPoint>(p).coords;
          data_.insert(data_.end(), c.begin(), c.end());
        }
      } else {
        stride_ = 3;
        data_.reserve(size_ * 3);
        for (const auto& p : pts) {
          const auto& t = std::get<RigidPose>(p).translation;
          data_.insert(data_.end(), {t.x(), t.y(), t.z()});
        }
      }
      embedding_dim_ = std::min<std::size_t>(stride_, 3);
      break;
    case 1:
      stride_ = 2;
      for (const auto& p : pts) {
        const auto& tp = std::get<TorusPoint>(p);
        data_.insert(data_.end(), {tp.theta(), tp.phi()});
      }
      break;
    case 2:
      stride_ = 9;
      for (const auto& p : pts) {
        const auto m = std::get<Rotation>(p).matrix();
        data_.insert(data_.end(), m.begin(), m.end());
      }
      break;
    default: {
      stride_ = 12;
      for (const auto& p : pts) {
        const auto& pose = std::get<RigidPose>(p);
        const auto m = pose.rotation.matrix();
        data_.insert(data_.end(), {pose.translation.x(), pose.translation.y(), pose.translation.z()});
        data_.insert(data_.end(), m.begin(), m.end());
      }
      embedding_dim_ = 3;
      embedding_scale_ = std::get<SE3WeightedMetric>(metric_).translation_weight;
      break;
    }
  }
  if (embedding_dim_ > 0) {
    embedding_.resize(size_ * embedding_dim_);
    for (std::size_t i = 0; i < size_; ++i) {
      std::copy_n(data_.data() + i * stride_, embedding_dim_, embedding_.data() + i * embedding_dim_);
    }
  }
}

double PreparedPoints::distance(std::size_t i, std::size_t j) const {
  const double* a = data_.data() + i * stride_;
  const double* b = data_.data() + j * stride_;
  switch (metric_.index()) {
    case 0: return kernel::l2(a, b, stride_);
    case 1: return kernel::torus_l2(a[0], a[1], b[0], b[1]);
    case 2: return kernel::so3_frobenius(a, b);
    default:
      return kernel::se3_weighted(kernel::l2(a, b, 3), kernel::so3_frobenius(a + 3, b + 3),
                                  std::get<SE3WeightedMetric>(metric_));
  }
}

DistanceField::DistanceField(std::size_t n, std::vector<double> values, double gamma)
    : n_(n), times_(n), values_(std::move(values)), gamma_(gamma), mask_(n * n) {
  for (std::size_t i = 0; i < n_; ++i) times_[i] = static_cast<double>(i) / static_cast<double>(n_ - 1);
  times_.back() = 1.0;
  for (std::size_t k = 0; k < values_.size(); ++k) mask_[k] = values_[k] <= gamma_ ? 1 : 0;
}

DistanceField DistanceField::from_values(std::vector<double> values, std::size_t resolution, double gamma) {
  if (resolution < 2) throw ConfigError("resolution must be at least 2");
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be non-negative");
  if (values.size() != resolution * resolution) throw ConfigError("value grid must be resolution^2 long");
  for (std::size_t i = 0; i < resolution; ++i) {
    if (values[i * resolution + i] != 0.0) throw ConfigError("distance field diagonal must be zero");
    for (std::size_t j = 0; j < resolution; ++j) {
      const double v = values[i * resolution + j];
      if (!(v >= 0.0) || v != values[j * resolution + i]) {
        throw ConfigError("distance field must be symmetric and non-negative");
      }
    }
  }
  return DistanceField(resolution, std::move(values), gamma);
}

std::size_t DistanceField::index_for_time(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw RangeError("time outside [0, 1]");
  return static_cast<std::size_t>(std::llround(t * static_cast<double>(n_ - 1)));
}

DistanceField DistanceField::with_gamma(double gamma) const {
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be non-negative");
  return DistanceField(n_, values_, gamma);
}

std::size_t DistanceField::mask_popcount() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

std::size_t default_resolution(const Trajectory& trajectory) {
  return std::min<std::size_t>(trajectory.size(), 2048);
}

DistanceField build_distance_field(const Trajectory& trajectory, double gamma, std::size_t resolution,
                                   std::size_t workers) {
  if (resolution < 2) throw ConfigError("resolution must be at least 2");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be finite and non-negative");
  const std::size_t n = resolution;
  const PreparedPoints prepared(trajectory);
  std::vector<std::size_t> sample_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = i + 1 == n ? 1.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    sample_of[i] = trajectory.nearest_index(t);
  }
  std::vector<double> values(n * n, 0.0);
  // Each (i, j) pair with j > i is written by exactly one worker, together
  // with its mirror.
  parallel_strided(n, workers, [&](std::size_t i) {
    const std::size_t si = sample_of[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = prepared.distance(si, sample_of[j]);
      values[i * n + j] = v;
      values[j * n + i] = v;
    }
  });
  return DistanceField(n, std::move(values), gamma);
}

}  // namespace loopscope
