#pragma once

// Budgeted samplers over clustered detections, one per complexity class:
//   ConstantPerComponent  sigma_1:     c samples per cluster
//   PerPointPerComponent  sigma_rho:   r samples per cluster per sample time
//   ProportionalToArea    sigma_alpha: uniform over all detections
// The first two keep at least one sample per cluster.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "loopscope/detection.hpp"

namespace loopscope {

struct ConstantPerComponent {
  std::size_t c = 1;
};
struct PerPointPerComponent {
  std::size_t r = 1;
};
struct ProportionalToArea {};

using SamplerKind = std::variant<ConstantPerComponent, PerPointPerComponent, ProportionalToArea>;

struct SamplerSpec {
  SamplerKind kind = PerPointPerComponent{};
  std::size_t budget = 10000;
  std::uint64_t seed = 0;
};

// "const", "rho" or "alpha".
std::string sampler_name(const SamplerKind& kind);

struct SampledLoop {
  Detection detection;
  int cluster_id = -1;  // -1 for unclustered draws
};

struct SamplePlan {
  SamplerSpec sampler;
  std::vector<SampledLoop> samples;  // ordered by cluster id, then detection
  std::map<int, std::size_t> per_cluster_counts;
  std::size_t covered_clusters = 0;
  // Clusters whose proportional share was below one sample and were raised
  // to the floor of one.
  std::size_t floor_activations = 0;
  bool budget_binding = false;
};

// Throws BudgetError when a floored sampler's budget is below the number of
// clusters, ConfigError for invalid parameters.
SamplePlan sample(std::span<const DetectionCluster> clusters, const SamplerSpec& spec);

// sigma_alpha over a bare detection list (no clustering). Other samplers
// need clusters and throw ConfigError.
SamplePlan sample_unclustered(std::span<const Detection> detections, const SamplerSpec& spec);

// Splits `budget` over clusters wanting wanted[k] >= 1 samples: everything
// when it fits, otherwise one each plus a largest-remainder share of the rest
// proportional to wanted[k] - 1 (ties to the lower index). Throws BudgetError
// when budget < wanted.size().
std::vector<std::size_t> allocate_with_floor(std::span<const std::size_t> wanted, std::size_t budget,
                                             std::size_t* floor_activations = nullptr);

struct ClusterCoverage {
  int cluster_id = 0;
  std::size_t cluster_size = 0;
  std::size_t sample_count = 0;
  // Smallest (t, t')-plane distance between two samples of the cluster;
  // absent with fewer than two samples.
  std::optional<double> min_sample_spacing;
};

struct CoverageReport {
  std::vector<ClusterCoverage> clusters;
  double coverage_fraction = 1.0;  // P1: share of clusters with >= 1 sample
  // P3: Spearman rank correlation of cluster size vs sample count; absent
  // when either ranking is constant.
  std::optional<double> size_count_spearman;
  std::size_t floor_activations = 0;
};

CoverageReport coverage_report(const SamplePlan& plan, std::span<const DetectionCluster> clusters);

// Spearman correlation with average ranks for ties.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

}  // namespace loopscope
