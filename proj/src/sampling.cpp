#include "loopscope/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "loopscope/error.hpp"
#include "loopscope/random.hpp"

namespace loopscope {

namespace {

__extension__ typedef unsigned __int128 Wide;

void validate(const SamplerSpec& spec) {
  if (spec.budget < 1) throw ConfigError("sampling budget must be at least 1");
  if (const auto* k = std::get_if<ConstantPerComponent>(&spec.kind); k && k->c < 1) {
    throw ConfigError("samples per component c must be at least 1");
  }
  if (const auto* k = std::get_if<PerPointPerComponent>(&spec.kind); k && k->r < 1) {
    throw ConfigError("samples per point r must be at least 1");
  }
}

// Indices into a cluster's detections chosen by sigma_rho before budgeting.
std::vector<std::size_t> per_point_candidates(const DetectionCluster& cluster, std::size_t r, Rng& rng) {
  const auto& dets = cluster.detections;
  // (time, detection index) for both endpoints of every detection.
  std::vector<std::pair<double, std::size_t>> endpoints;
  endpoints.reserve(2 * dets.size());
  for (std::size_t k = 0; k < dets.size(); ++k) {
    endpoints.emplace_back(dets[k].t, k);
    endpoints.emplace_back(dets[k].t_prime, k);
  }
  std::sort(endpoints.begin(), endpoints.end());
  std::vector<std::uint8_t> chosen(dets.size(), 0);
  for (std::size_t lo = 0; lo < endpoints.size();) {
    std::size_t hi = lo;
    while (hi < endpoints.size() && endpoints[hi].first == endpoints[lo].first) ++hi;
    for (std::size_t pick : choose_sorted(rng, hi - lo, r)) chosen[endpoints[lo + pick].second] = 1;
    lo = hi;
  }
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < dets.size(); ++k) {
    if (chosen[k]) out.push_back(k);
  }
  return out;
}

void finalize(SamplePlan& plan, std::span<const DetectionCluster> clusters) {
  for (const auto& c : clusters) plan.per_cluster_counts[c.id] = 0;
  for (const auto& s : plan.samples) {
    if (s.cluster_id >= 0) ++plan.per_cluster_counts[s.cluster_id];
  }
  plan.covered_clusters = static_cast<std::size_t>(std::count_if(
      plan.per_cluster_counts.begin(), plan.per_cluster_counts.end(), [](const auto& kv) { return kv.second > 0; }));
}

}  // namespace

std::string sampler_name(const SamplerKind& kind) {
  switch (kind.index()) {
    case 0: return "const";
    case 1: return "rho";
    default: return "alpha";
  }
}

std::vector<std::size_t> allocate_with_floor(std::span<const std::size_t> wanted, std::size_t budget,
                                             std::size_t* floor_activations) {
  if (floor_activations) *floor_activations = 0;
  const std::size_t k = wanted.size();
  std::vector<std::size_t> out(wanted.begin(), wanted.end());
  const std::size_t total = std::accumulate(wanted.begin(), wanted.end(), std::size_t{0});
  if (k == 0) return out;
  if (budget < k) throw BudgetError(budget, k);
  if (total <= budget) return out;

  const std::uint64_t rest = budget - k;
  const std::uint64_t excess = total - k;  // > rest because total > budget
  std::vector<std::uint64_t> remainder(k);
  std::size_t assigned = k;
  for (std::size_t c = 0; c < k; ++c) {
    const Wide share = static_cast<Wide>(wanted[c] - 1) * rest;
    out[c] = 1 + static_cast<std::size_t>(share / excess);
    remainder[c] = static_cast<std::uint64_t>(share % excess);
    assigned += out[c] - 1;
    // Plain proportional share wanted * budget / total below one sample.
    if (floor_activations &&
        static_cast<Wide>(wanted[c]) * budget < static_cast<Wide>(total)) {
      ++*floor_activations;
    }
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t m = 0; assigned < budget; ++m) {
    ++out[order[m % k]];
    ++assigned;
  }
  return out;
}

SamplePlan sample(std::span<const DetectionCluster> clusters, const SamplerSpec& spec) {
  validate(spec);
  SamplePlan plan;
  plan.sampler = spec;
  for (const auto& c : clusters) {
    if (c.detections.empty()) throw ConfigError("clusters must be non-empty");
  }

  if (std::holds_alternative<ProportionalToArea>(spec.kind)) {
    std::size_t total = 0;
    for (const auto& c : clusters) total += c.detections.size();
    Rng rng(spec.seed);
    const auto picks = choose_sorted(rng, total, spec.budget);
    plan.budget_binding = total > spec.budget;
    std::size_t cluster = 0;
    std::size_t offset = 0;
    for (std::size_t flat : picks) {
      while (flat >= offset + clusters[cluster].detections.size()) offset += clusters[cluster++].detections.size();
      plan.samples.push_back({clusters[cluster].detections[flat - offset], clusters[cluster].id});
    }
    finalize(plan, clusters);
    return plan;
  }

  // Candidates per cluster, each from its own seeded stream.
  std::vector<std::vector<std::size_t>> candidates(clusters.size());
  std::vector<std::size_t> wanted(clusters.size());
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    Rng rng(mix_seed(spec.seed, static_cast<std::uint64_t>(clusters[k].id)));
    const std::size_t size = clusters[k].detections.size();
    if (const auto* constant = std::get_if<ConstantPerComponent>(&spec.kind)) {
      candidates[k] = choose_sorted(rng, size, constant->c);
    } else {
      candidates[k] = per_point_candidates(clusters[k], std::get<PerPointPerComponent>(spec.kind).r, rng);
    }
    wanted[k] = candidates[k].size();
  }
  const auto allocation = allocate_with_floor(wanted, spec.budget, &plan.floor_activations);
  plan.budget_binding = std::accumulate(wanted.begin(), wanted.end(), std::size_t{0}) > spec.budget;
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    std::vector<std::size_t> keep = candidates[k];
    if (allocation[k] < keep.size()) {
      Rng rng(mix_seed(spec.seed ^ 0x5bd1e995ULL, static_cast<std::uint64_t>(clusters[k].id)));
      std::vector<std::size_t> trimmed;
      for (std::size_t pick : choose_sorted(rng, keep.size(), allocation[k])) trimmed.push_back(keep[pick]);
      keep = std::move(trimmed);
    }
    for (std::size_t idx : keep) plan.samples.push_back({clusters[k].detections[idx], clusters[k].id});
  }
  finalize(plan, clusters);
  return plan;
}

SamplePlan sample_unclustered(std::span<const Detection> detections, const SamplerSpec& spec) {
  validate(spec);
  if (!std::holds_alternative<ProportionalToArea>(spec.kind)) {
    throw ConfigError("sampler '" + sampler_name(spec.kind) + "' needs clustered detections");
  }
  SamplePlan plan;
  plan.sampler = spec;
  Rng rng(spec.seed);
  plan.budget_binding = detections.size() > spec.budget;
  for (std::size_t idx : choose_sorted(rng, detections.size(), spec.budget)) {
    plan.samples.push_back({detections[idx], -1});
  }
  return plan;
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  auto ranks = [](std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t lo = 0; lo < order.size();) {
      std::size_t hi = lo;
      while (hi < order.size() && v[order[hi]] == v[order[lo]]) ++hi;
      const double avg = 0.5 * static_cast<double>(lo + hi - 1) + 1.0;
      for (std::size_t k = lo; k < hi; ++k) r[order[k]] = avg;
      lo = hi;
    }
    return r;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < rx.size(); ++k) {
    sxy += (rx[k] - mx) * (ry[k] - my);
    sxx += (rx[k] - mx) * (rx[k] - mx);
    syy += (ry[k] - my) * (ry[k] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

CoverageReport coverage_report(const SamplePlan& plan, std::span<const DetectionCluster> clusters) {
  CoverageReport report;
  report.floor_activations = plan.floor_activations;
  std::map<int, std::vector<const Detection*>> by_cluster;
  for (const auto& s : plan.samples) by_cluster[s.cluster_id].push_back(&s.detection);
  std::vector<double> sizes, counts;
  std::size_t covered = 0;
  for (const auto& c : clusters) {
    ClusterCoverage row;
    row.cluster_id = c.id;
    row.cluster_size = c.detections.size();
    const auto it = by_cluster.find(c.id);
    if (it != by_cluster.end()) {
      const auto& members = it->second;
      row.sample_count = members.size();
      for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) {
          const double dt = members[a]->t - members[b]->t;
          const double dp = members[a]->t_prime - members[b]->t_prime;
          const double d = std::sqrt(dt * dt + dp * dp);
          if (!row.min_sample_spacing || d < *row.min_sample_spacing) row.min_sample_spacing = d;
        }
      }
    }
    if (row.sample_count > 0) ++covered;
    sizes.push_back(static_cast<double>(row.cluster_size));
    counts.push_back(static_cast<double>(row.sample_count));
    report.clusters.push_back(row);
  }
  report.coverage_fraction = clusters.empty() ? 1.0 : static_cast<double>(covered) / static_cast<double>(clusters.size());
  report.size_count_spearman = spearman(sizes, counts);
  return report;
}

}  // namespace loopscope
