#pragma once

// Points on the manifolds a trajectory may live on, and the metrics used to
// compare them: R^n, the torus S^1 x S^1, SO(3) and SE(3).

#include <array>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace loopscope {

// Point in R^n, n >= 1 (meters).
struct EuclideanPoint {
  std::vector<double> coords;
};

// Point on S^1 x S^1. Angles are wrapped to [-pi, pi) on construction.
class TorusPoint {
 public:
  TorusPoint() = default;
  TorusPoint(double theta, double phi);

  double theta() const { return theta_; }
  double phi() const { return phi_; }

 private:
  double theta_ = 0.0;
  double phi_ = 0.0;
};

// Wraps an angle to [-pi, pi).
double wrap_angle(double angle);

// Rotation stored as an axis-angle vector with magnitude <= pi.
class Rotation {
 public:
  Rotation() : axis_angle_(Eigen::Vector3d::Zero()) {}

  // Any finite axis-angle vector; magnitude is canonicalized into [0, pi].
  static Rotation from_axis_angle(const Eigen::Vector3d& axis_angle);
  // Quaternion (w, x, y, z); renormalized before conversion.
  static Rotation from_quaternion(double w, double x, double y, double z);

  const Eigen::Vector3d& axis_angle() const { return axis_angle_; }
  double angle() const { return axis_angle_.norm(); }

  // Rodrigues' formula, row-major 3x3.
  std::array<double, 9> matrix() const;

 private:
  explicit Rotation(const Eigen::Vector3d& v) : axis_angle_(v) {}
  Eigen::Vector3d axis_angle_;
};

struct RigidPose {
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  Rotation rotation;
};

using ManifoldPoint = std::variant<EuclideanPoint, TorusPoint, Rotation, RigidPose>;

// Euclidean distance on R^n, or on the translation part of a RigidPose.
struct L2Metric {};
// Least angular distance per axis, combined as L2.
struct TorusL2Metric {};
// ||I - R_a R_b^T||_F.
struct SO3FrobeniusMetric {};
// sqrt(w_t^2 d_trans^2 + w_r^2 d_rot^2), d_rot the SO(3) Frobenius distance.
struct SE3WeightedMetric {
  double translation_weight = 1.0;
  double rotation_weight = 1.0;
};

using MetricSpec = std::variant<L2Metric, TorusL2Metric, SO3FrobeniusMetric, SE3WeightedMetric>;

// Throws ConfigError for invalid metric parameters.
void validate(const MetricSpec& metric);

// True when the metric can measure this point variant.
bool compatible(const MetricSpec& metric, const ManifoldPoint& point);

// Distance between two points. Throws MetricMismatchError when either point
// does not fit the metric (or Euclidean dimensions differ).
double distance(const MetricSpec& metric, const ManifoldPoint& a, const ManifoldPoint& b);

// Short identifiers used in files and on the command line:
// l2, torus_l2, so3_frobenius, se3_weighted.
std::string metric_name(const MetricSpec& metric);
MetricSpec parse_metric(const std::string& name, double translation_weight = 1.0,
                        double rotation_weight = 1.0);

namespace kernel {

// Raw distance kernels shared by distance() and the prepared point tables so
// every code path produces bit-identical values. All are exactly symmetric.
double l2(const double* a, const double* b, std::size_t n);
double torus_l2(double theta_a, double phi_a, double theta_b, double phi_b);
// Row-major rotation matrices.
double so3_frobenius(const double* ra, const double* rb);
double se3_weighted(double translation_distance, double rotation_distance,
                    const SE3WeightedMetric& weights);

}  // namespace kernel

}  // namespace loopscope
