#pragma once

// File formats: trajectory files (native CSV and TUM), detection / cluster /
// sample-plan / coverage / component tables, and PGM rasters. Floats are
// written with 17 significant digits so re-parsing is bit-exact.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "loopscope/components.hpp"
#include "loopscope/detection.hpp"
#include "loopscope/measures.hpp"
#include "loopscope/sampling.hpp"
#include "loopscope/trajectory.hpp"

namespace loopscope::io {

std::string format_double(double value);
// Whole-string parse; throws IoError(path, line) on failure.
double parse_double(const std::string& text, const std::string& path, std::size_t line);

// Native trajectory file:
//   # loopscope-trajectory manifold=<euclidean|torus|so3|se3> dim=<n> metric=<name> [w_t=<x> w_r=<x>]
//   t_seconds,<coords...>
// Coordinates: euclidean x1..xn; torus theta,phi; so3 rx,ry,rz (axis-angle);
// se3 tx,ty,tz,rx,ry,rz. Files without the header are read as TUM poses
// (`timestamp tx ty tz qx qy qz qw`, space separated, '#' comments), which
// default to L2 on translations. metric_override replaces the file's metric.
Trajectory parse_trajectory(std::istream& in, const std::string& name,
                            const std::optional<MetricSpec>& metric_override = std::nullopt);
Trajectory read_trajectory(const std::filesystem::path& path,
                           const std::optional<MetricSpec>& metric_override = std::nullopt);
void write_trajectory(std::ostream& out, const Trajectory& trajectory);
void write_trajectory(const std::filesystem::path& path, const Trajectory& trajectory);

// Binary PGM (P5). 8-bit when max_value < 256, else 16-bit big-endian.
void write_pgm(const std::filesystem::path& path, std::size_t width, std::size_t height,
               std::span<const std::uint16_t> pixels, std::uint16_t max_value);

// Field raster: round(255 * min(d / (2 gamma), 1)); gamma 0 maps any
// positive distance to 255.
std::vector<std::uint16_t> field_raster(const DistanceField& field);
// Mask raster: 255 inside, 0 outside.
std::vector<std::uint16_t> mask_raster(const DistanceField& field);
// Label raster over the full square: component id + 1, 0 outside the mask.
std::vector<std::uint16_t> label_raster(const ComponentSet& components);

// t,t_prime,dist
void write_detections_csv(const std::filesystem::path& path, std::span<const Detection> detections);
std::vector<Detection> read_detections_csv(const std::filesystem::path& path);

// t,t_prime,dist,cluster_id
void write_clusters_csv(const std::filesystem::path& path, std::span<const DetectionCluster> clusters);
std::vector<DetectionCluster> read_clusters_csv(const std::filesystem::path& path);

// t,t_prime,dist,cluster_id,sampler
void write_sample_plan_csv(const std::filesystem::path& path, const SamplePlan& plan);
// Restores samples, sampler kind and counts (budget and seed are not stored
// in the table).
SamplePlan read_sample_plan_csv(const std::filesystem::path& path);

// cluster_id,cluster_size,sample_count,min_sample_spacing followed by
// summary rows (coverage_fraction, size_count_spearman, floor_activations).
void write_coverage_csv(const std::filesystem::path& path, const CoverageReport& report);

// id,is_trivial,area,holes,t_min,t_max,tp_min,tp_max
void write_components_csv(const std::filesystem::path& path, const ComponentSet& components);

// Key,value rows.
void write_key_values(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::string>>& rows);

}  // namespace loopscope::io
