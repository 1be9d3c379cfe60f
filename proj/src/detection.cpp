#include "loopscope/detection.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "loopscope/error.hpp"
#include "loopscope/random.hpp"

namespace loopscope {

namespace {

using CellKey = std::array<std::int64_t, 3>;

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = splitmix64(static_cast<std::uint64_t>(k[0]));
    h = splitmix64(h ^ static_cast<std::uint64_t>(k[1]));
    h = splitmix64(h ^ static_cast<std::uint64_t>(k[2]));
    return static_cast<std::size_t>(h);
  }
};

constexpr double kMaxCellCoordinate = 4.0e15;

void check_detect_args(double gamma, double exclude_band) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("detection gamma must be positive and finite");
  if (!(exclude_band >= 0.0)) throw ConfigError("exclude band must be non-negative");
}

// First sample index j with times[j] - times[i] > band.
std::size_t first_outside_band(const std::vector<double>& times, std::size_t i, double band) {
  std::size_t j = static_cast<std::size_t>(
      std::upper_bound(times.begin() + static_cast<std::ptrdiff_t>(i), times.end(), times[i] + band) -
      times.begin());
  // upper_bound on times[i] + band can disagree with the subtraction test by
  // one ulp; settle on the subtraction form used by the brute-force oracle.
  while (j > i + 1 && times[j - 1] - times[i] > band) --j;
  while (j < times.size() && !(times[j] - times[i] > band)) ++j;
  return std::max(j, i + 1);
}

std::vector<Detection> detect_banded(const Trajectory& trajectory, const PreparedPoints& points, double gamma,
                                     double exclude_band, std::size_t workers) {
  const auto& times = trajectory.times();
  const std::size_t n = times.size();
  std::vector<std::vector<Detection>> per_row(n);
  parallel_strided(n, workers, [&](std::size_t i) {
    for (std::size_t j = first_outside_band(times, i, exclude_band); j < n; ++j) {
      const double d = points.distance(i, j);
      if (d <= gamma) per_row[i].push_back({times[i], times[j], d});
    }
  });
  std::vector<Detection> out;
  for (auto& row : per_row) out.insert(out.end(), row.begin(), row.end());
  return out;
}

}  // namespace

std::vector<Detection> detect_brute_force(const Trajectory& trajectory, double gamma, double exclude_band) {
  check_detect_args(gamma, exclude_band);
  const auto& times = trajectory.times();
  const auto& pts = trajectory.points();
  std::vector<Detection> out;
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (std::size_t j = i + 1; j < times.size(); ++j) {
      if (!(times[j] - times[i] > exclude_band)) continue;
      const double d = distance(trajectory.metric(), pts[i], pts[j]);
      if (d <= gamma) out.push_back({times[i], times[j], d});
    }
  }
  return out;
}

std::vector<Detection> detect(const Trajectory& trajectory, double gamma, double exclude_band,
                              std::size_t workers) {
  check_detect_args(gamma, exclude_band);
  const PreparedPoints points(trajectory);
  const std::size_t dim = points.embedding_dim();
  if (dim == 0) return detect_banded(trajectory, points, gamma, exclude_band, workers);

  // distance <= gamma implies embedding distance <= gamma / scale, so cells of
  // that size and a 3^dim neighborhood cover every candidate.
  const double cell = gamma / points.embedding_scale();
  const std::size_t n = points.size();
  std::vector<CellKey> keys(n);
  for (std::size_t i = 0; i < n; ++i) {
    CellKey key{0, 0, 0};
    const double* e = points.embedding(i);
    for (std::size_t d = 0; d < dim; ++d) {
      const double c = std::floor(e[d] / cell);
      if (!(std::fabs(c) < kMaxCellCoordinate)) {
        return detect_banded(trajectory, points, gamma, exclude_band, workers);
      }
      key[d] = static_cast<std::int64_t>(c);
    }
    keys[i] = key;
  }
  std::unordered_map<CellKey, std::vector<std::uint32_t>, CellKeyHash> grid;
  grid.reserve(n);
  for (std::size_t i = 0; i < n; ++i) grid[keys[i]].push_back(static_cast<std::uint32_t>(i));

  const auto& times = trajectory.times();
  const std::int64_t span1 = dim >= 2 ? 1 : 0;
  const std::int64_t span2 = dim >= 3 ? 1 : 0;
  std::vector<std::vector<Detection>> per_row(n);
  parallel_strided(n, workers, [&](std::size_t i) {
    const std::size_t j_begin = first_outside_band(times, i, exclude_band);
    if (j_begin >= n) return;
    std::vector<std::uint32_t> candidates;
    const CellKey& base = keys[i];
    for (std::int64_t a = -1; a <= 1; ++a) {
      for (std::int64_t b = -span1; b <= span1; ++b) {
        for (std::int64_t c = -span2; c <= span2; ++c) {
          const auto it = grid.find({base[0] + a, base[1] + b, base[2] + c});
          if (it == grid.end()) continue;
          const auto& bucket = it->second;
          // Buckets are ascending; skip indices inside the band.
          auto first = std::lower_bound(bucket.begin(), bucket.end(), static_cast<std::uint32_t>(j_begin));
          candidates.insert(candidates.end(), first, bucket.end());
        }
      }
    }
    std::sort(candidates.begin(), candidates.end());
    auto& row = per_row[i];
    for (std::uint32_t j : candidates) {
      const double d = points.distance(i, j);
      if (d <= gamma) row.push_back({times[i], times[j], d});
    }
  });
  std::size_t total = 0;
  for (const auto& row : per_row) total += row.size();
  std::vector<Detection> out;
  out.reserve(total);
  for (auto& row : per_row) {
    out.insert(out.end(), row.begin(), row.end());
    std::vector<Detection>().swap(row);
  }
  return out;
}

std::vector<Detection> subsample(std::span<const Detection> detections, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("subsample fraction must be in (0, 1]");
  if (fraction == 1.0) return {detections.begin(), detections.end()};
  const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(detections.size())));
  Rng rng(seed);
  std::vector<Detection> out;
  out.reserve(k);
  for (std::size_t idx : choose_sorted(rng, detections.size(), k)) out.push_back(detections[idx]);
  return out;
}

std::vector<DetectionCluster> cluster_detections(std::span<const Detection> detections,
                                                 const DetectionGraphConfig& config) {
  if (!(config.epsilon > 0.0) || !std::isfinite(config.epsilon)) throw ConfigError("epsilon must be positive");
  if (config.min_component_size < 1) throw ConfigError("min_component_size must be at least 1");
  const std::size_t n = detections.size();
  // Sort first so ids and tie-breaks never depend on the caller's order.
  std::vector<Detection> sorted(detections.begin(), detections.end());
  std::sort(sorted.begin(), sorted.end());

  const double eps = config.epsilon;
  using Key = std::pair<std::int64_t, std::int64_t>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return static_cast<std::size_t>(splitmix64(splitmix64(static_cast<std::uint64_t>(k.first)) ^
                                                 static_cast<std::uint64_t>(k.second)));
    }
  };
  std::unordered_map<Key, std::vector<std::uint32_t>, KeyHash> grid;
  std::vector<Key> keys(n);
  for (std::size_t k = 0; k < n; ++k) {
    keys[k] = {static_cast<std::int64_t>(std::floor(sorted[k].t / eps)),
               static_cast<std::int64_t>(std::floor(sorted[k].t_prime / eps))};
    grid[keys[k]].push_back(static_cast<std::uint32_t>(k));
  }
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t k = 0; k < n; ++k) {
    for (std::int64_t a = -1; a <= 1; ++a) {
      for (std::int64_t b = -1; b <= 1; ++b) {
        const auto it = grid.find({keys[k].first + a, keys[k].second + b});
        if (it == grid.end()) continue;
        for (std::uint32_t m : it->second) {
          if (m <= k) continue;
          const double dt = sorted[k].t - sorted[m].t;
          const double dp = sorted[k].t_prime - sorted[m].t_prime;
          if (std::sqrt(dt * dt + dp * dp) < eps) {
            std::uint32_t ra = find(static_cast<std::uint32_t>(k));
            std::uint32_t rb = find(m);
            if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
          }
        }
      }
    }
  }
  std::vector<int> cluster_of_root(n, -1);
  std::vector<DetectionCluster> clusters;
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint32_t root = find(static_cast<std::uint32_t>(k));
    if (cluster_of_root[root] < 0) {
      cluster_of_root[root] = static_cast<int>(clusters.size());
      clusters.push_back({static_cast<int>(clusters.size()), {}});
    }
    clusters[cluster_of_root[root]].detections.push_back(sorted[k]);
  }
  if (config.min_component_size > 1) {
    std::erase_if(clusters, [&](const DetectionCluster& c) { return c.detections.size() < config.min_component_size; });
    for (std::size_t k = 0; k < clusters.size(); ++k) clusters[k].id = static_cast<int>(k);
  }
  return clusters;
}

}  // namespace loopscope
