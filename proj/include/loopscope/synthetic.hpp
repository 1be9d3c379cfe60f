#pragma once

// Parametric fixture trajectories, uniformly parameterized in time.

#include <cstddef>
#include <numbers>
#include <string>
#include <variant>

#include "loopscope/trajectory.hpp"

namespace loopscope::synthetic {

// Radius shared by the manifold circle fixtures (angle units), 7/8 pi.
inline constexpr double kCircleRadius = 7.0 * std::numbers::pi / 8.0;

// Circle arc in R^2 covering `fraction` of a full turn.
struct PartialCircle {
  double radius = kCircleRadius;
  double fraction = 0.95;
};

// Full circle, straight connector of length `offset`, second full circle
// on the far side; offset 0 makes the circles tangent.
struct DoubleLoop {
  double radius = 1.5;
  double offset = 0.0;
};

// Archimedean spiral r = pitch * theta / (2 pi) over `turns` turns.
struct Spiral {
  double pitch = 0.8;
  double turns = 4.0;
};

// Thin ellipse (semi-axes length x width) traversed `laps` times. With
// laps >= 2 the trivial component encloses holes once gamma exceeds the
// width.
struct CloverNontrivial {
  double length = 5.0;
  double width = 0.3;
  int laps = 2;
};

// Circle of the given radius in the (theta, phi) chart of the torus, starting
// at phase pi/4 so the wrap-around approaches avoid the t = 0 seam.
struct TorusCircle {
  double radius = kCircleRadius;
};

// Circle in the axis-angle chart: p(s) = radius (cos 2 pi s, sin 2 pi s, 0).
struct SO3Circle {
  double radius = kCircleRadius;
};

// Straight unit-speed-in-time segment along the first axis.
struct Line {
  double length = 1.0;
  std::size_t dim = 1;
};

using GeneratorKind = std::variant<PartialCircle, DoubleLoop, Spiral, CloverNontrivial, TorusCircle, SO3Circle, Line>;

struct GeneratorSpec {
  GeneratorKind kind = PartialCircle{};
  std::size_t samples = 1000;
  // Raw duration assigned to [0, 1]; 0 selects 10 Hz sampling.
  double duration_seconds = 0.0;
};

// Throws ConfigError for invalid parameters.
Trajectory generate(const GeneratorSpec& spec);

// circle, double_loop, spiral, clover, torus_circle, so3_circle, line
std::string generator_name(const GeneratorKind& kind);

}  // namespace loopscope::synthetic
