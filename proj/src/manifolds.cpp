#include "loopscope/manifolds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "loopscope/error.hpp"

namespace loopscope {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool finite3(const Eigen::Vector3d& v) {
  return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

const char* variant_name(const ManifoldPoint& p) {
  switch (p.index()) {
    case 0: return "euclidean";
    case 1: return "torus";
    case 2: return "rotation";
    default: return "pose";
  }
}

}  // namespace

double wrap_angle(double angle) {
  if (!std::isfinite(angle)) throw ConfigError("angle must be finite");
  double w = angle - kTwoPi * std::floor((angle + kPi) / kTwoPi);
  // Rounding can land exactly on +pi.
  if (w >= kPi) w -= kTwoPi;
  if (w < -kPi) w = -kPi;
  return w;
}

TorusPoint::TorusPoint(double theta, double phi)
    : theta_(wrap_angle(theta)), phi_(wrap_angle(phi)) {}

Rotation Rotation::from_axis_angle(const Eigen::Vector3d& axis_angle) {
  if (!finite3(axis_angle)) throw ConfigError("axis-angle vector must be finite");
  const double angle = axis_angle.norm();
  if (angle <= kPi) return Rotation(axis_angle);
  const Eigen::Vector3d axis = axis_angle / angle;
  double reduced = std::fmod(angle, kTwoPi);
  if (reduced > kPi) return Rotation(-axis * (kTwoPi - reduced));
  return Rotation(axis * reduced);
}

Rotation Rotation::from_quaternion(double w, double x, double y, double z) {
  const double norm = std::sqrt(w * w + x * x + y * y + z * z);
  if (!std::isfinite(norm) || norm == 0.0) throw ConfigError("quaternion must be finite and non-zero");
  w /= norm;
  x /= norm;
  y /= norm;
  z /= norm;
  if (w < 0.0) {
    w = -w;
    x = -x;
    y = -y;
    z = -z;
  }
  const double s = std::sqrt(x * x + y * y + z * z);
  if (s == 0.0) return Rotation();
  const double angle = 2.0 * std::atan2(s, w);
  return from_axis_angle(Eigen::Vector3d(x, y, z) * (angle / s));
}

std::array<double, 9> Rotation::matrix() const {
  const double angle = axis_angle_.norm();
  if (angle == 0.0) return {1, 0, 0, 0, 1, 0, 0, 0, 1};
  const Eigen::Vector3d k = axis_angle_ / angle;
  const double s = std::sin(angle);
  const double c = 1.0 - std::cos(angle);
  // R = I + s K + c K^2 with K = [k]_x, K^2 = k k^T - I.
  return {
      1.0 + c * (k.x() * k.x() - 1.0), -s * k.z() + c * k.x() * k.y(), s * k.y() + c * k.x() * k.z(),
      s * k.z() + c * k.x() * k.y(), 1.0 + c * (k.y() * k.y() - 1.0), -s * k.x() + c * k.y() * k.z(),
      -s * k.y() + c * k.x() * k.z(), s * k.x() + c * k.y() * k.z(), 1.0 + c * (k.z() * k.z() - 1.0)};
}

namespace kernel {

double l2(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = a[k] - b[k];
    sum += d * d;
  }
  return std::sqrt(sum);
}

namespace {
double least_angular_distance(double a, double b) {
  const double d = std::fabs(a - b);  // in [0, 2pi) for wrapped inputs
  return std::min(d, kTwoPi - d);
}
}  // namespace

double torus_l2(double theta_a, double phi_a, double theta_b, double phi_b) {
  const double dt = least_angular_distance(theta_a, theta_b);
  const double dp = least_angular_distance(phi_a, phi_b);
  return std::sqrt(dt * dt + dp * dp);
}

double so3_frobenius(const double* ra, const double* rb) {
  if (std::equal(ra, ra + 9, rb)) return 0.0;
  // D = I - Ra Rb^T. Entry D_ij of the swapped call equals D_ji here, so
  // summing the squares of each (ij, ji) pair together keeps the result
  // bit-identical under argument swap.
  double d[9];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double m = ra[3 * i] * rb[3 * j] + ra[3 * i + 1] * rb[3 * j + 1] + ra[3 * i + 2] * rb[3 * j + 2];
      d[3 * i + j] = (i == j ? 1.0 : 0.0) - m;
    }
  }
  double sum = d[0] * d[0] + d[4] * d[4] + d[8] * d[8];
  sum += d[1] * d[1] + d[3] * d[3];
  sum += d[2] * d[2] + d[6] * d[6];
  sum += d[5] * d[5] + d[7] * d[7];
  return std::sqrt(sum);
}

double se3_weighted(double translation_distance, double rotation_distance,
                    const SE3WeightedMetric& weights) {
  const double t = weights.translation_weight * translation_distance;
  const double r = weights.rotation_weight * rotation_distance;
  return std::sqrt(t * t + r * r);
}

}  // namespace kernel

void validate(const MetricSpec& metric) {
  if (const auto* se3 = std::get_if<SE3WeightedMetric>(&metric)) {
    if (!(se3->translation_weight > 0.0) || !(se3->rotation_weight > 0.0) ||
        !std::isfinite(se3->translation_weight) || !std::isfinite(se3->rotation_weight)) {
      throw ConfigError("SE(3) metric weights must be finite and strictly positive");
    }
  }
}

bool compatible(const MetricSpec& metric, const ManifoldPoint& point) {
  switch (metric.index()) {
    case 0: return std::holds_alternative<EuclideanPoint>(point) || std::holds_alternative<RigidPose>(point);
    case 1: return std::holds_alternative<TorusPoint>(point);
    case 2: return std::holds_alternative<Rotation>(point);
    default: return std::holds_alternative<RigidPose>(point);
  }
}

double distance(const MetricSpec& metric, const ManifoldPoint& a, const ManifoldPoint& b) {
  validate(metric);
  if (!compatible(metric, a) || !compatible(metric, b) || a.index() != b.index()) {
    throw MetricMismatchError(metric_name(metric) + " cannot compare " + variant_name(a) + " with " +
                              variant_name(b));
  }
  switch (metric.index()) {
    case 0: {
      if (const auto* ea = std::get_if<EuclideanPoint>(&a)) {
        const auto& eb = std::get<EuclideanPoint>(b);
        if (ea->coords.size() != eb.coords.size() || ea->coords.empty()) {
          throw MetricMismatchError("euclidean dimensions differ or are zero");
        }
        return kernel::l2(ea->coords.data(), eb.coords.data(), ea->coords.size());
      }
      const auto& pa = std::get<RigidPose>(a);
      const auto& pb = std::get<RigidPose>(b);
      return kernel::l2(pa.translation.data(), pb.translation.data(), 3);
    }
    case 1: {
      const auto& ta = std::get<TorusPoint>(a);
      const auto& tb = std::get<TorusPoint>(b);
      return kernel::torus_l2(ta.theta(), ta.phi(), tb.theta(), tb.phi());
    }
    case 2: {
      const auto ra = std::get<Rotation>(a).matrix();
      const auto rb = std::get<Rotation>(b).matrix();
      return kernel::so3_frobenius(ra.data(), rb.data());
    }
    default: {
      const auto& pa = std::get<RigidPose>(a);
      const auto& pb = std::get<RigidPose>(b);
      const auto ra = pa.rotation.matrix();
      const auto rb = pb.rotation.matrix();
      return kernel::se3_weighted(kernel::l2(pa.translation.data(), pb.translation.data(), 3),
                                  kernel::so3_frobenius(ra.data(), rb.data()),
                                  std::get<SE3WeightedMetric>(metric));
    }
  }
}

std::string metric_name(const MetricSpec& metric) {
  switch (metric.index()) {
    case 0: return "l2";
    case 1: return "torus_l2";
    case 2: return "so3_frobenius";
    default: return "se3_weighted";
  }
}

MetricSpec parse_metric(const std::string& name, double translation_weight, double rotation_weight) {
  if (name == "l2") return L2Metric{};
  if (name == "torus_l2") return TorusL2Metric{};
  if (name == "so3_frobenius") return SO3FrobeniusMetric{};
  if (name == "se3_weighted") {
    MetricSpec m = SE3WeightedMetric{translation_weight, rotation_weight};
    validate(m);
    return m;
  }
  throw ConfigError("unknown metric '" + name + "' (expected l2, torus_l2, so3_frobenius, se3_weighted)");
}

}  // namespace loopscope
