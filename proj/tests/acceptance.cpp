// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "loopscope/components.hpp"
#include "loopscope/detection.hpp"
#include "loopscope/io.hpp"
#include "loopscope/measures.hpp"
#include "loopscope/sampling.hpp"
#include "loopscope/synthetic.hpp"
#include "support/oracles.hpp"

using namespace loopscope;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("loopscope_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Every regular file under a and b, compared by relative path and bytes.
bool same_tree(const fs::path& a, const fs::path& b, std::string& why, std::size_t* files = nullptr) {
  std::vector<fs::path> names;
  for (const auto& e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) names.push_back(fs::relative(e.path(), a));
  std::size_t count_b = 0;
  for (const auto& e : fs::recursive_directory_iterator(b)) count_b += e.is_regular_file();
  if (names.size() != count_b) {
    why = "file sets differ";
    return false;
  }
  for (const auto& n : names) {
    if (!fs::exists(b / n) || slurp(a / n) != slurp(b / n)) {
      why = n.string() + " differs";
      return false;
    }
  }
  if (files) *files = names.size();
  return true;
}

Trajectory fixture(const synthetic::GeneratorKind& kind, std::size_t samples = 2000) {
  return synthetic::generate({kind, samples});
}

ComponentSet components_of(const Trajectory& traj, double gamma, std::size_t n = 512) {
  return extract_components(build_distance_field(traj, gamma, n));
}

// 1. Metric axioms on random triples.
Outcome metric_axioms() {
  Outcome out;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> g;
  auto rotation = [&] {
    Eigen::Vector3d axis(g(rng), g(rng), g(rng));
    double angle = pi * (0.5 + 0.5 * u(rng));
    if (rng() % 10 == 0) angle = pi - 1e-9 * std::abs(u(rng));
    return Rotation::from_axis_angle(axis.normalized() * angle);
  };
  auto pose = [&] {
    RigidPose p;
    p.translation = {10 * u(rng), 10 * u(rng), 10 * u(rng)};
    p.rotation = rotation();
    return p;
  };
  const std::vector<std::pair<std::string, std::function<std::pair<MetricSpec, ManifoldPoint>()>>> metrics{
      {"l2", [&] { return std::pair<MetricSpec, ManifoldPoint>{L2Metric{}, EuclideanPoint{{10 * u(rng), 10 * u(rng), 10 * u(rng)}}}; }},
      {"torus_l2", [&] { return std::pair<MetricSpec, ManifoldPoint>{TorusL2Metric{}, TorusPoint(4 * u(rng), 4 * u(rng))}; }},
      {"so3_frobenius", [&] { return std::pair<MetricSpec, ManifoldPoint>{SO3FrobeniusMetric{}, rotation()}; }},
      {"se3_weighted", [&] { return std::pair<MetricSpec, ManifoldPoint>{SE3WeightedMetric{0.7, 3.0}, pose()}; }},
  };
  double worst_triangle = 0.0, worst_identity = 0.0;
  for (const auto& [name, draw] : metrics) {
    std::size_t asym = 0, ident = 0, tri = 0;
    for (int k = 0; k < 10000; ++k) {
      const auto [m, a] = draw();
      const auto b = draw().second, c = draw().second;
      const double ab = distance(m, a, b), ba = distance(m, b, a);
      const double bc = distance(m, b, c), ac = distance(m, a, c);
      asym += ab != ba;
      const double aa = distance(m, a, a);
      worst_identity = std::max(worst_identity, aa);
      ident += aa > 1e-12;
      const double slack = (ac - (ab + bc)) / std::max(ab + bc, ac);
      worst_triangle = std::max(worst_triangle, slack);
      tri += slack > 1e-9;
    }
    out.require(asym == 0, name + " asymmetric x" + std::to_string(asym));
    out.require(ident == 0, name + " identity x" + std::to_string(ident));
    out.require(tri == 0, name + " triangle x" + std::to_string(tri));
  }
  if (out.pass) {
    out.detail = "4 metrics x 1e4 triples, max d(a,a) " + fmt("%.1e", worst_identity) + ", max triangle excess " +
                 fmt("%.1e", worst_triangle);
  }
  return out;
}

// 2. Component phenomena of the planar fixtures at N = 512.
Outcome planar_phenomena() {
  Outcome out;
  const auto circle = components_of(fixture(synthetic::PartialCircle{}), 1.0);
  out.require(circle.size() == 2, "circle: " + std::to_string(circle.size()) + " components");
  const auto dl = fixture(synthetic::DoubleLoop{});
  const auto dl1 = components_of(dl, 1.0), dl3 = components_of(dl, 3.0);
  out.require(dl1.size() > 1, "double loop gamma 1: " + std::to_string(dl1.size()));
  out.require(dl3.size() == 1, "double loop gamma 3: " + std::to_string(dl3.size()));
  const auto spiral = fixture(synthetic::Spiral{});
  for (double g : {1.0, 3.0}) {
    const auto cs = components_of(spiral, g);
    out.require(cs.size() == 1 && cs[0].is_trivial, "spiral gamma " + fmt("%g", g));
  }
  const auto clover = components_of(fixture(synthetic::CloverNontrivial{}), 1.0);
  out.require(clover[0].is_trivial && clover[0].hole_count >= 1, "clover has no hole");
  if (out.pass) {
    out.detail = "circle 2, double loop " + std::to_string(dl1.size()) + " -> 1, spiral 1/1, clover holes " +
                 std::to_string(clover[0].hole_count);
  }
  return out;
}

// 3. Torus and SO(3) circle phenomena.
Outcome manifold_phenomena() {
  Outcome out;
  const auto torus = fixture(synthetic::TorusCircle{});
  const double closure = torus.pairwise_distance(0.0, 1.0);
  out.require(closure <= 1e-6, "torus closure " + fmt("%g", closure));
  const auto tcs = components_of(torus, 1.0);
  const std::int32_t corner = tcs.label_at(0, 511);
  int near = 0;
  for (const auto& c : tcs.components()) near += !c.is_trivial && c.id != corner;
  out.require(near == 2, "torus near-approach components: " + std::to_string(near));

  const auto so3 = fixture(synthetic::SO3Circle{});
  const auto field = build_distance_field(so3, 1.0, 512);
  std::size_t arg = 0;
  double best = INFINITY;
  for (std::size_t j = 0; j < 512; ++j) {
    const double t = field.times()[j];
    if (t < 0.25 || t > 0.75) continue;
    if (field.value(0, j) < best) {
      best = field.value(0, j);
      arg = j;
    }
  }
  // Dense scan of the continuous curve, built independently.
  const double r = synthetic::kCircleRadius;
  auto rot = [&](double s) {
    return Eigen::AngleAxisd(r, Eigen::Vector3d(std::cos(2 * pi * s), std::sin(2 * pi * s), 0)).toRotationMatrix();
  };
  const Eigen::Matrix3d r0 = rot(0.0);
  double s_star = 0.0, d_star = INFINITY;
  for (int k = 0; k <= 200000; ++k) {
    const double s = 0.25 + 0.5 * k / 200000.0;
    const double d = (Eigen::Matrix3d::Identity() - r0 * rot(s).transpose()).norm();
    if (d < d_star) {
      d_star = d;
      s_star = s;
    }
  }
  const double cells = std::abs(static_cast<double>(arg) - s_star * 511.0);
  out.require(cells <= 2.0, "so3 argmin off by " + fmt("%.2f", cells) + " cells");
  if (out.pass) {
    out.detail = "torus closure " + fmt("%.1e", closure) + ", 2 near-approach components; so3 argmin t'=" +
                 fmt("%.4f", field.times()[arg]) + " vs oracle " + fmt("%.4f", s_star) + " (" + fmt("%.2f", cells) +
                 " cells)";
  }
  return out;
}

// 4. Measure identities.
Outcome measure_identities() {
  Outcome out;
  for (const auto& [kind, gamma] : std::vector<std::pair<synthetic::GeneratorKind, double>>{
           {synthetic::TorusCircle{}, 1.0}, {synthetic::DoubleLoop{}, 1.0}, {synthetic::PartialCircle{}, 1.0}}) {
    const auto field = build_distance_field(fixture(kind), gamma, 512);
    const auto cs = extract_components(field);
    for (std::size_t row = 0; row < 512; ++row) {
      std::size_t sum = 0;
      for (const auto& c : cs.components())
        sum += duration_cell_count(cs, field, MeasureSelection::of_components({c.id}), row);
      if (sum != duration_cell_count(cs, field, MeasureSelection::whole(), row)) {
        out.require(false, synthetic::generator_name(kind) + " row " + std::to_string(row) + " not additive");
        break;
      }
    }
    for (const auto& c : cs.components()) {
      const auto sel = MeasureSelection::of_components({c.id});
      out.require(loop_density(cs, field, sel, 0, 1) == loop_area(cs, field, sel, 0, 1), "rho(0,1) != alpha(0,1)");
    }
  }
  const auto line = synthetic::generate({synthetic::Line{}, 512});
  const auto field = build_distance_field(line, 0.1, 512);
  const auto cs = extract_components(field);
  const double alpha = loop_area(cs, field, MeasureSelection::whole(), 0, 1);
  out.require(std::abs(alpha - 0.19) <= 2.0 / 512.0, "line alpha " + fmt("%.5f", alpha));
  out.require(loop_density(cs, field, MeasureSelection::whole(), 0, 1) == alpha, "line rho != alpha");
  if (out.pass) out.detail = "additive on 3 fixtures x 512 rows; line alpha(0,1) = " + fmt("%.5f", alpha);
  return out;
}

// 5. Labeling and detection against reference implementations.
Outcome oracle_equivalence() {
  Outcome out;
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const double p = 0.2 + 0.6 * static_cast<double>(trial) / 200.0;
    std::vector<std::uint8_t> mask(64 * 64);
    for (auto& m : mask) m = static_cast<double>(rng() >> 11) * 0x1.0p-53 < p;
    if (label_upper_triangle(mask, 64) != oracle::bfs_labels(mask, 64)) {
      out.require(false, "mask " + std::to_string(trial) + " labels differ");
      break;
    }
  }
  std::size_t pairs = 0;
  const std::vector<std::pair<synthetic::GeneratorKind, double>> cases{
      {synthetic::PartialCircle{}, 1.0}, {synthetic::DoubleLoop{}, 1.0}, {synthetic::DoubleLoop{}, 3.0},
      {synthetic::Spiral{}, 1.0}, {synthetic::CloverNontrivial{}, 1.0}, {synthetic::TorusCircle{}, 1.0},
      {synthetic::SO3Circle{}, 1.0}, {synthetic::Line{}, 0.1}};
  for (const auto& [kind, gamma] : cases) {
    const auto traj = fixture(kind);
    for (double band : {0.0, 0.05}) {
      const auto fast = detect(traj, gamma, band);
      pairs += fast.size();
      out.require(fast == oracle::all_pairs(traj, gamma, band),
                  synthetic::generator_name(kind) + " gamma " + fmt("%g", gamma) + " band " + fmt("%g", band));
    }
  }
  if (out.pass) {
    out.detail = "200 masks exact; " + std::to_string(cases.size()) + " fixtures x 2 bands, " +
                 std::to_string(pairs) + " detections exact";
  }
  return out;
}

DetectionCluster make_cluster(int id, std::vector<Detection> d) {
  std::sort(d.begin(), d.end());
  return {id, std::move(d)};
}

// 6. Sampler coverage, miss rate and growth classes.
Outcome sampler_properties() {
  Outcome out;
  std::vector<DetectionCluster> three;
  {
    std::vector<std::size_t> sizes{100, 10, 1};
    for (int k = 0; k < 3; ++k) {
      std::vector<Detection> d;
      for (std::size_t m = 0; m < sizes[k]; ++m)
        d.push_back({0.05 + 0.3 * k + 1e-4 * static_cast<double>(m % 10), 0.9 + 1e-4 * static_cast<double>(m / 10), 0});
      three.push_back(make_cluster(k, d));
    }
  }
  int missed = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    for (const SamplerKind kind : {SamplerKind{ConstantPerComponent{2}}, SamplerKind{PerPointPerComponent{1}}}) {
      const auto plan = sample(three, {kind, 10, seed});
      out.require(coverage_report(plan, three).coverage_fraction == 1.0, sampler_name(kind) + " missed a cluster");
    }
    missed += sample(three, {ProportionalToArea{}, 10, seed}).per_cluster_counts.at(2) == 0;
  }
  const double miss_rate = missed / 100.0;
  const double expected = oracle::miss_probability(111, 1, 10);
  out.require(std::abs(miss_rate - expected) <= 0.06, "alpha miss rate " + fmt("%.2f", miss_rate));

  // Reference block of side s0 and a block scaled k times along both axes.
  const std::size_t s0 = 20;
  const double h = 1e-4;
  auto count_ratio = [&](const SamplerKind& kind, std::size_t budget, std::size_t k) {
    const std::vector<DetectionCluster> clusters{make_cluster(0, oracle::block(0.05, 0.5, s0, h)),
                                                 make_cluster(1, oracle::block(0.2, 0.8, s0 * k, h))};
    double ref = 0, scaled = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto plan = sample(clusters, {kind, budget, seed});
      ref += static_cast<double>(plan.per_cluster_counts.at(0));
      scaled += static_cast<double>(plan.per_cluster_counts.at(1));
    }
    return scaled / ref;
  };
  std::string growth;
  for (std::size_t k : {2u, 3u}) {
    const double kd = static_cast<double>(k);
    const double rho = count_ratio(PerPointPerComponent{1}, 1000000, k) / count_ratio(PerPointPerComponent{1}, 1000000, 1);
    const double alpha = count_ratio(ProportionalToArea{}, 200, k) / count_ratio(ProportionalToArea{}, 200, 1);
    const double one = count_ratio(ConstantPerComponent{3}, 1000000, k) / count_ratio(ConstantPerComponent{3}, 1000000, 1);
    out.require(std::abs(rho / kd - 1.0) <= 0.25, "rho growth " + fmt("%.2f", rho) + " at k=" + std::to_string(k));
    out.require(std::abs(alpha / (kd * kd) - 1.0) <= 0.25,
                "alpha growth " + fmt("%.2f", alpha) + " at k=" + std::to_string(k));
    out.require(std::abs(one - 1.0) <= 0.25, "const growth " + fmt("%.2f", one));
    growth += " k=" + std::to_string(k) + ": rho " + fmt("%.2f", rho) + ", alpha " + fmt("%.2f", alpha) + ", const " +
              fmt("%.2f", one) + ";";
  }
  if (out.pass) {
    out.detail = "floored coverage 1.0 over 100 seeds; alpha miss rate " + fmt("%.2f", miss_rate) + " (oracle " +
                 fmt("%.4f", expected) + ");" + growth;
  }
  return out;
}

struct ProtocolResult {
  std::size_t detections = 0, kept = 0, clusters = 0, samples = 0;
  double coverage = 0.0;
};

ProtocolResult run_protocol(const Trajectory& traj, std::size_t workers, const fs::path& dir) {
  const double eps = traj.normalized_duration(30.0);
  const auto all = detect(traj, 40.0, eps, workers);
  const auto kept = subsample(all, 0.01, 7);
  DetectionGraphConfig cfg;
  cfg.epsilon = eps;
  const auto clusters = cluster_detections(kept, cfg);
  const auto plan = sample(clusters, {PerPointPerComponent{1}, 10000, 7});
  const auto report = coverage_report(plan, clusters);
  io::write_detections_csv(dir / "detections.csv", kept);
  io::write_clusters_csv(dir / "clusters.csv", clusters);
  io::write_sample_plan_csv(dir / "sample_plan.csv", plan);
  io::write_coverage_csv(dir / "coverage.csv", report);
  return {all.size(), kept.size(), clusters.size(), plan.samples.size(), report.coverage_fraction};
}

// 7. Protocol-scale smoke test.
Outcome protocol_smoke() {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  const auto traj = oracle::city_drive(75000, 42);
  const auto a = scratch_dir("protocol_a"), b = scratch_dir("protocol_b");
  const auto ra = run_protocol(traj, default_worker_count(), a);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  run_protocol(traj, 1, b);
  std::string why;
  out.require(same_tree(a, b, why), "rerun " + why);
  out.require(ra.coverage == 1.0, "coverage " + fmt("%.3f", ra.coverage));
  out.require(ra.samples <= 10000, "budget exceeded");
  out.require(seconds < 300.0, "took " + fmt("%.1f", seconds) + " s");
  if (out.pass) {
    out.detail = "75000 poses: " + std::to_string(ra.detections) + " detections, " + std::to_string(ra.kept) +
                 " kept, " + std::to_string(ra.clusters) + " clusters, " + std::to_string(ra.samples) +
                 " samples, coverage 1.0, " + fmt("%.1f", seconds) + " s, byte-identical rerun";
  }
  fs::remove_all(a);
  fs::remove_all(b);
  return out;
}

// 8. CLI outputs are byte-identical across reruns and thread counts.
Outcome cli_determinism() {
  Outcome out;
  const auto root = scratch_dir("cli");
  const std::string cli = LOOPSCOPE_CLI_PATH;
  auto run = [&](const std::string& env, const std::string& args) {
    const std::string cmd = env + " \"" + cli + "\" " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    out.require(rc == 0, "exit " + std::to_string(rc) + ": " + args);
  };
  const std::vector<std::string> runs{"threads1", "threads1_again", "threads3"};
  for (const auto& name : runs) {
    const auto dir = root / name;
    const std::string env = "LOOPSCOPE_THREADS=" + std::string(name == "threads3" ? "3" : "1");
    const std::string traj = (dir / "circle.csv").string();
    const std::string so3 = (dir / "so3.csv").string();
    fs::create_directories(dir);
    run(env, "generate circle --samples 1500 --out " + traj);
    run(env, "generate so3_circle --samples 800 --out " + so3);
    run(env, "field " + traj + " --gamma 1 --resolution 300 --out " + (dir / "field").string());
    run(env, "components " + traj + " --gamma 1 --resolution 300 --out " + (dir / "components").string());
    run(env, "measures " + traj + " --gamma 1 --resolution 300 --a 0.1 --b 0.9 --out " + (dir / "measures").string());
    run(env, "detect " + traj + " --gamma 1 --exclude-band 5 --out " + (dir / "detect").string());
    run(env, "detect " + so3 + " --gamma 1.2 --exclude-band 2 --fraction 0.5 --seed 3 --out " +
                 (dir / "detect_so3").string());
    for (const std::string s : {"alpha", "rho", "const"}) {
      run(env, "sample " + traj + " --gamma 1 --epsilon 3 --exclude-band 5 --sampler " + s +
                   " --budget 40 --c 2 --r 1 --seed 11 --out " + (dir / ("sample_" + s)).string());
    }
    run(env, "report --clusters " + (dir / "sample_rho" / "clusters.csv").string() + " --plan " +
                 (dir / "sample_rho" / "sample_plan.csv").string() + " --out " + (dir / "report").string());
  }
  std::size_t files = 0;
  for (std::size_t k = 1; k < runs.size(); ++k) {
    std::string why;
    out.require(same_tree(root / runs[0], root / runs[k], why, &files), runs[k] + ": " + why);
  }
  if (out.pass) out.detail = std::to_string(files) + " output files byte-identical across 3 runs (1, 1, 3 threads)";
  fs::remove_all(root);
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"metric axioms", metric_axioms},
      {"planar component phenomena", planar_phenomena},
      {"torus and so3 phenomena", manifold_phenomena},
      {"measure identities", measure_identities},
      {"oracle equivalence", oracle_equivalence},
      {"sampler properties", sampler_properties},
      {"protocol-scale smoke test", protocol_smoke},
      {"cli determinism", cli_determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome result;
    try {
      result = criteria[k].second();
    } catch (const std::exception& e) {
      result.pass = false;
      result.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (k == 0 && secs >= 5.0) result.require(false, "runtime " + fmt("%.1f", secs) + " s");
    if (k == 1 && secs >= 30.0) result.require(false, "runtime " + fmt("%.1f", secs) + " s");
    failed += !result.pass;
    std::printf("[%s] %zu %s (%.1f s): %s\n", result.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), secs,
                result.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
