#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "loopscope/trajectory.hpp"

namespace loopscope {

// One inexact loop between two sample times, canonical t < t_prime.
struct Detection {
  double t = 0.0;
  double t_prime = 0.0;
  double dist = 0.0;

  auto operator<=>(const Detection&) const = default;
};

struct DetectionGraphConfig {
  double epsilon = 0.01;               // normalized time
  std::size_t min_component_size = 1;  // clusters smaller than this are dropped
  double subsample_fraction = 1.0;
  std::uint64_t seed = 0;
};

struct DetectionCluster {
  int id = 0;
  std::vector<Detection> detections;  // sorted
};

// All sample pairs (t_i, t_j) with t_j - t_i > exclude_band and distance <=
// gamma, sorted by (t, t'). Uses a uniform hash grid (cell = gamma in the
// metric's Euclidean embedding) when the metric has one, banded brute force
// otherwise. Throws ConfigError unless gamma > 0 and exclude_band >= 0.
std::vector<Detection> detect(const Trajectory& trajectory, double gamma, double exclude_band = 0.0,
                              std::size_t workers = default_worker_count());

// Reference O(n^2) scan over every pair; same contract as detect().
std::vector<Detection> detect_brute_force(const Trajectory& trajectory, double gamma, double exclude_band = 0.0);

// Uniform sample without replacement of round(fraction * |d|) detections,
// order preserved. Throws ConfigError unless fraction is in (0, 1].
std::vector<Detection> subsample(std::span<const Detection> detections, double fraction, std::uint64_t seed);

// Connected components of the graph joining detections closer than epsilon
// in the (t, t') plane. Clusters are sorted internally and ordered by their
// smallest detection, so the result does not depend on input order.
std::vector<DetectionCluster> cluster_detections(std::span<const Detection> detections,
                                                 const DetectionGraphConfig& config);

}  // namespace loopscope
