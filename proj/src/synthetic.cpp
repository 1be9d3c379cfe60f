#include "loopscope/synthetic.hpp"

#include <cmath>

#include "loopscope/error.hpp"

namespace loopscope::synthetic {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(what);
}

ManifoldPoint planar(double x, double y) { return EuclideanPoint{{x, y}}; }

struct Visitor {
  double s;  // normalized time

  ManifoldPoint operator()(const PartialCircle& c) const {
    const double a = kTwoPi * c.fraction * s;
    return planar(c.radius * std::cos(a), c.radius * std::sin(a));
  }

  ManifoldPoint operator()(const DoubleLoop& d) const {
    // Arc-length parameterization over circle, connector, circle.
    const double circumference = kTwoPi * d.radius;
    const double total = 2.0 * circumference + d.offset;
    double u = s * total;
    if (u <= circumference) {
      // Left circle centred at (-r, 0), starting and ending at the origin.
      const double a = u / d.radius;
      return planar(-d.radius + d.radius * std::cos(a), d.radius * std::sin(a));
    }
    u -= circumference;
    if (u <= d.offset) return planar(u, 0.0);
    u -= d.offset;
    const double a = u / d.radius;
    // Right circle centred at (offset + r, 0), starting at (offset, 0).
    return planar(d.offset + d.radius - d.radius * std::cos(a), -d.radius * std::sin(a));
  }

  ManifoldPoint operator()(const Spiral& sp) const {
    const double theta = kTwoPi * sp.turns * s;
    const double r = sp.pitch * theta / kTwoPi;
    return planar(r * std::cos(theta), r * std::sin(theta));
  }

  ManifoldPoint operator()(const CloverNontrivial& c) const {
    const double a = kTwoPi * static_cast<double>(c.laps) * s;
    return planar(c.length * std::cos(a), c.width * std::sin(a));
  }

  ManifoldPoint operator()(const TorusCircle& c) const {
    const double a = kTwoPi * s + std::numbers::pi / 4.0;
    return TorusPoint(c.radius * std::cos(a), c.radius * std::sin(a));
  }

  ManifoldPoint operator()(const SO3Circle& c) const {
    const double a = kTwoPi * s;
    return Rotation::from_axis_angle(Eigen::Vector3d(c.radius * std::cos(a), c.radius * std::sin(a), 0.0));
  }

  ManifoldPoint operator()(const Line& l) const {
    std::vector<double> coords(l.dim, 0.0);
    coords[0] = l.length * s;
    return EuclideanPoint{std::move(coords)};
  }
};

void validate(const GeneratorKind& kind) {
  std::visit(
      [](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, PartialCircle>) {
          require(k.radius > 0.0, "circle radius must be positive");
          require(k.fraction > 0.0 && k.fraction <= 1.0, "circle fraction must be in (0, 1]");
        } else if constexpr (std::is_same_v<K, DoubleLoop>) {
          require(k.radius > 0.0, "double-loop radius must be positive");
          require(k.offset >= 0.0, "double-loop offset must be non-negative");
        } else if constexpr (std::is_same_v<K, Spiral>) {
          require(k.pitch > 0.0 && k.turns > 0.0, "spiral pitch and turns must be positive");
        } else if constexpr (std::is_same_v<K, CloverNontrivial>) {
          require(k.length > 0.0 && k.width > 0.0, "clover length and width must be positive");
          require(k.laps >= 1, "clover laps must be at least 1");
        } else if constexpr (std::is_same_v<K, Line>) {
          require(k.length > 0.0, "line length must be positive");
          require(k.dim >= 1, "line dimension must be at least 1");
        } else {
          require(k.radius > 0.0, "circle radius must be positive");
        }
      },
      kind);
}

MetricSpec default_metric(const GeneratorKind& kind) {
  if (std::holds_alternative<TorusCircle>(kind)) return TorusL2Metric{};
  if (std::holds_alternative<SO3Circle>(kind)) return SO3FrobeniusMetric{};
  return L2Metric{};
}

}  // namespace

Trajectory generate(const GeneratorSpec& spec) {
  require(spec.samples >= 2, "generator needs at least 2 samples");
  require(spec.duration_seconds >= 0.0 && std::isfinite(spec.duration_seconds), "duration must be non-negative");
  validate(spec.kind);
  const std::size_t n = spec.samples;
  std::vector<double> times(n);
  std::vector<ManifoldPoint> points;
  points.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    times[k] = k + 1 == n ? 1.0 : static_cast<double>(k) / static_cast<double>(n - 1);
    points.push_back(std::visit(Visitor{times[k]}, spec.kind));
  }
  const double duration =
      spec.duration_seconds > 0.0 ? spec.duration_seconds : static_cast<double>(n - 1) / 10.0;
  return Trajectory(std::move(times), std::move(points), default_metric(spec.kind), TimeSpan{0.0, duration});
}

std::string generator_name(const GeneratorKind& kind) {
  static const char* names[] = {"circle", "double_loop", "spiral", "clover", "torus_circle", "so3_circle", "line"};
  return names[kind.index()];
}

}  // namespace loopscope::synthetic
