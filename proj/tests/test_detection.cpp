#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "loopscope/components.hpp"
#include "loopscope/detection.hpp"
#include "loopscope/error.hpp"
#include "loopscope/synthetic.hpp"
#include "support/oracles.hpp"

using namespace loopscope;

TEST_CASE("line detections are every pair within gamma") {
  const auto traj = synthetic::generate({synthetic::Line{}, 201});
  const auto d = detect(traj, 0.1, 0.0);
  CHECK(d == oracle::all_pairs(traj, 0.1, 0.0));
  for (const auto& x : d) CHECK(x.t < x.t_prime);
}

TEST_CASE("gamma above every distance returns all pairs") {
  const auto traj = synthetic::generate({synthetic::PartialCircle{}, 120});
  CHECK(detect(traj, 100.0, 0.0).size() == 120 * 119 / 2);
}

TEST_CASE("spatial index matches brute force on every manifold") {
  const std::vector<std::pair<synthetic::GeneratorKind, double>> cases{
      {synthetic::PartialCircle{}, 1.0}, {synthetic::DoubleLoop{}, 1.0}, {synthetic::Spiral{}, 1.0},
      {synthetic::CloverNontrivial{}, 0.5}, {synthetic::TorusCircle{}, 1.0}, {synthetic::SO3Circle{}, 1.0},
      {synthetic::Line{1.0, 3}, 0.05}};
  for (const auto& [kind, gamma] : cases) {
    const auto traj = synthetic::generate({kind, 600});
    for (double band : {0.0, 0.05, 0.5}) {
      const auto fast = detect(traj, gamma, band, 2);
      CHECK(fast == oracle::all_pairs(traj, gamma, band));
      CHECK(fast == detect_brute_force(traj, gamma, band));
    }
  }
}

TEST_CASE("SE3 poses use the translation bound") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> secs;
  std::vector<ManifoldPoint> pts;
  for (int k = 0; k < 400; ++k) {
    RigidPose p;
    p.translation = {3 * u(rng), 3 * u(rng), 0.5 * u(rng)};
    p.rotation = Rotation::from_axis_angle({u(rng), u(rng), u(rng)});
    secs.push_back(k * 0.1);
    pts.push_back(p);
  }
  for (const MetricSpec m : {MetricSpec{L2Metric{}}, MetricSpec{SE3WeightedMetric{2.0, 0.5}}}) {
    const auto traj = Trajectory::from_raw_times(secs, pts, m);
    CHECK(detect(traj, 1.0, 0.01, 3) == oracle::all_pairs(traj, 1.0, 0.01));
  }
}

TEST_CASE("detections do not depend on worker count") {
  const auto traj = synthetic::generate({synthetic::Spiral{}, 1500});
  CHECK(detect(traj, 0.8, 0.01, 1) == detect(traj, 0.8, 0.01, 4));
}

TEST_CASE("exclude band keeps only the far component on the partial circle") {
  const std::size_t n = 1000;
  const auto traj = synthetic::generate({synthetic::PartialCircle{}, n});
  const auto cs = extract_components(build_distance_field(traj, 1.0, n));
  REQUIRE(cs.size() == 2);
  const auto d = detect(traj, 1.0, 0.5);
  REQUIRE_FALSE(d.empty());
  for (const auto& x : d) {
    const auto i = traj.nearest_index(x.t), j = traj.nearest_index(x.t_prime);
    REQUIRE(cs.label_at(i, j) == 1);
  }
}

TEST_CASE("detect argument checks") {
  const auto traj = synthetic::generate({synthetic::Line{}, 10});
  CHECK_THROWS_AS(detect(traj, 0.0), ConfigError);
  CHECK_THROWS_AS(detect(traj, 1.0, -0.1), ConfigError);
}

TEST_CASE("subsample") {
  std::vector<Detection> d;
  for (int k = 0; k < 10000; ++k) d.push_back({k * 1e-5, 0.5 + k * 1e-5, 0.0});
  CHECK(subsample(d, 1.0, 9) == d);
  const auto s = subsample(d, 0.01, 9);
  CHECK(s.size() == 100);
  CHECK(std::is_sorted(s.begin(), s.end()));
  CHECK(s == subsample(d, 0.01, 9));
  CHECK(s != subsample(d, 0.01, 10));
  CHECK_THROWS_AS(subsample(d, 0.0, 1), ConfigError);
  CHECK_THROWS_AS(subsample(d, 1.5, 1), ConfigError);
}

TEST_CASE("epsilon graph clustering examples") {
  const double eps = 0.01;
  DetectionGraphConfig cfg;
  cfg.epsilon = eps;
  const std::vector<Detection> close{{0.1, 0.9, 0}, {0.1 + eps / 2, 0.9, 0}};
  CHECK(cluster_detections(close, cfg).size() == 1);
  const std::vector<Detection> apart{{0.1, 0.9, 0}, {0.1 + 2 * eps, 0.9, 0}};
  CHECK(cluster_detections(apart, cfg).size() == 2);
  // Exactly epsilon apart is not linked.
  const std::vector<Detection> edge{{0.25, 0.5, 0}, {0.25, 1.0, 0}};
  cfg.epsilon = 0.5;
  CHECK(cluster_detections(edge, cfg).size() == 2);
}

TEST_CASE("clustering is independent of input order and drops small clusters") {
  std::vector<Detection> d = oracle::block(0.1, 0.6, 5, 0.001);
  const auto far = oracle::block(0.3, 0.9, 2, 0.001);
  d.insert(d.end(), far.begin(), far.end());
  DetectionGraphConfig cfg;
  cfg.epsilon = 0.0015;
  const auto a = cluster_detections(d, cfg);
  std::mt19937_64 rng(5);
  std::shuffle(d.begin(), d.end(), rng);
  const auto b = cluster_detections(d, cfg);
  REQUIRE(a.size() == 2);
  REQUIRE(b.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) CHECK(a[k].detections == b[k].detections);
  CHECK(a[0].detections.size() == 25);
  cfg.min_component_size = 5;
  const auto kept = cluster_detections(d, cfg);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].id == 0);
}

TEST_CASE("dense detections cluster like the dense field components") {
  const std::size_t n = 800;
  const auto traj = synthetic::generate({synthetic::PartialCircle{}, n});
  const auto cs = extract_components(build_distance_field(traj, 1.0, n));
  DetectionGraphConfig cfg;
  cfg.epsilon = 0.02;
  const auto clusters = cluster_detections(detect(traj, 1.0, 0.0), cfg);
  REQUIRE(clusters.size() == cs.size());
  std::set<int> matched;
  for (const auto& c : clusters) {
    std::map<int, int> votes;
    for (const auto& x : c.detections) ++votes[cs.label_at(traj.nearest_index(x.t), traj.nearest_index(x.t_prime))];
    const auto best = std::max_element(votes.begin(), votes.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
    matched.insert(best->first);
  }
  CHECK(matched.size() == cs.size());
}
