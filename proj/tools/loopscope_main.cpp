// loopscope: command-line front end for inexact-loop analysis.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "loopscope/components.hpp"
#include "loopscope/detection.hpp"
#include "loopscope/error.hpp"
#include "loopscope/io.hpp"
#include "loopscope/measures.hpp"
#include "loopscope/sampling.hpp"
#include "loopscope/synthetic.hpp"

namespace fs = std::filesystem;
using namespace loopscope;

namespace {

struct TrajectoryOptions {
  std::string path;
  std::string metric;
  double w_t = 1.0;
  double w_r = 1.0;
};

struct RunConfig {
  TrajectoryOptions input;
  double gamma = 1.0;
  double epsilon_seconds = 30.0;
  std::size_t resolution = 0;  // 0: min(samples, 2048)
  std::size_t budget = 10000;
  std::string sampler = "rho";
  std::size_t c = 1;
  std::size_t r = 1;
  double fraction = 1.0;
  std::optional<double> exclude_band_seconds;
  std::uint64_t seed = 0;
  std::size_t min_cluster_size = 1;
  double a = 0.0;
  double b = 1.0;
  std::string out = ".";
};

void add_input(CLI::App* cmd, TrajectoryOptions& in) {
  cmd->add_option("trajectory", in.path, "Trajectory file (native CSV or TUM)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--metric", in.metric, "Override metric: l2, torus_l2, so3_frobenius, se3_weighted");
  cmd->add_option("--w-t", in.w_t, "SE(3) translation weight");
  cmd->add_option("--w-r", in.w_r, "SE(3) rotation weight");
}

void add_gamma(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--gamma", cfg.gamma,
                  "Loop threshold in the metric's units (meters for L2 translations, dimensionless for "
                  "so3_frobenius)")
      ->required()
      ->check(CLI::NonNegativeNumber);
}

void add_out_dir(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--out", cfg.out, "Output directory")->required();
}

Trajectory load(const TrajectoryOptions& in) {
  std::optional<MetricSpec> metric;
  if (!in.metric.empty()) metric = parse_metric(in.metric, in.w_t, in.w_r);
  return io::read_trajectory(in.path, metric);
}

fs::path prepare_dir(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

std::size_t resolution_for(const RunConfig& cfg, const Trajectory& traj) {
  return cfg.resolution > 0 ? cfg.resolution : default_resolution(traj);
}

std::vector<std::pair<std::string, std::string>> span_rows(const Trajectory& traj) {
  return {{"t0_seconds", io::format_double(traj.raw_span().start)},
          {"tf_seconds", io::format_double(traj.raw_span().end)},
          {"seconds_per_unit_time", io::format_double(traj.raw_span().duration())},
          {"samples", std::to_string(traj.size())},
          {"metric", metric_name(traj.metric())}};
}

void cmd_field(const RunConfig& cfg) {
  const Trajectory traj = load(cfg.input);
  const auto field = build_distance_field(traj, cfg.gamma, resolution_for(cfg, traj));
  const auto dir = prepare_dir(cfg.out);
  const std::size_t n = field.resolution();
  io::write_pgm(dir / "field.pgm", n, n, io::field_raster(field), 255);
  io::write_pgm(dir / "mask.pgm", n, n, io::mask_raster(field), 255);
  auto rows = span_rows(traj);
  rows.insert(rows.begin(), {{"resolution", std::to_string(n)}, {"gamma", io::format_double(cfg.gamma)}});
  io::write_key_values(dir / "field_meta.csv", rows);
}

void cmd_components(const RunConfig& cfg) {
  const Trajectory traj = load(cfg.input);
  const auto field = build_distance_field(traj, cfg.gamma, resolution_for(cfg, traj));
  const auto components = extract_components(field);
  const auto dir = prepare_dir(cfg.out);
  io::write_components_csv(dir / "components.csv", components);
  const std::size_t n = field.resolution();
  io::write_pgm(dir / "labels.pgm", n, n, io::label_raster(components), 65535);
}

void cmd_measures(const RunConfig& cfg) {
  const Trajectory traj = load(cfg.input);
  const auto field = build_distance_field(traj, cfg.gamma, resolution_for(cfg, traj));
  const auto components = extract_components(field);
  const auto dir = prepare_dir(cfg.out);
  const std::size_t n = field.resolution();
  const double w = field.cell_width();

  std::string profile = "t,tau,tau_begin,tau_end\n";
  const auto whole = MeasureSelection::whole();
  const auto begin = MeasureSelection::whole(Restriction::kBegin);
  const auto end = MeasureSelection::whole(Restriction::kEnd);
  for (std::size_t row = 0; row < n; ++row) {
    profile += io::format_double(field.times()[row]) + ',' +
               io::format_double(static_cast<double>(duration_cell_count(components, field, whole, row)) * w) + ',' +
               io::format_double(static_cast<double>(duration_cell_count(components, field, begin, row)) * w) + ',' +
               io::format_double(static_cast<double>(duration_cell_count(components, field, end, row)) * w) + '\n';
  }
  {
    std::ofstream out(dir / "measures_profile.csv", std::ios::trunc);
    out << profile;
    if (!out) throw IoError((dir / "measures_profile.csv").string(), 0, "write failed");
  }

  std::string summary = "selection,restriction,a,b,alpha,rho\n";
  auto add_rows = [&](const std::string& label, const std::optional<std::vector<int>>& ids) {
    const std::pair<const char*, Restriction> restrictions[] = {
        {"none", Restriction::kNone}, {"begin", Restriction::kBegin}, {"end", Restriction::kEnd}};
    for (const auto& [rname, r] : restrictions) {
      const MeasureSelection sel{ids, r};
      summary += label + ',' + rname + ',' + io::format_double(cfg.a) + ',' + io::format_double(cfg.b) + ',' +
                 io::format_double(loop_area(components, field, sel, cfg.a, cfg.b)) + ',' +
                 io::format_double(loop_density(components, field, sel, cfg.a, cfg.b)) + '\n';
    }
  };
  add_rows("whole", std::nullopt);
  for (const auto& c : components.components()) add_rows("component:" + std::to_string(c.id), std::vector<int>{c.id});
  std::ofstream out(dir / "measures_summary.csv", std::ios::trunc);
  out << summary;
  if (!out) throw IoError((dir / "measures_summary.csv").string(), 0, "write failed");
}

std::vector<Detection> run_detection(const RunConfig& cfg, const Trajectory& traj, double default_band_seconds) {
  const double band_seconds = cfg.exclude_band_seconds.value_or(default_band_seconds);
  if (!(cfg.gamma > 0.0)) throw ConfigError("detection needs --gamma > 0");
  auto detections = detect(traj, cfg.gamma, traj.normalized_duration(band_seconds));
  if (cfg.fraction < 1.0) detections = subsample(detections, cfg.fraction, cfg.seed);
  return detections;
}

void cmd_detect(const RunConfig& cfg) {
  const Trajectory traj = load(cfg.input);
  const auto detections = run_detection(cfg, traj, 0.0);
  const auto dir = prepare_dir(cfg.out);
  io::write_detections_csv(dir / "detections.csv", detections);
  auto rows = span_rows(traj);
  rows.insert(rows.begin(), {{"gamma", io::format_double(cfg.gamma)},
                             {"exclude_band_seconds", io::format_double(cfg.exclude_band_seconds.value_or(0.0))},
                             {"fraction", io::format_double(cfg.fraction)},
                             {"seed", std::to_string(cfg.seed)},
                             {"detections", std::to_string(detections.size())}});
  io::write_key_values(dir / "run_meta.csv", rows);
}

SamplerSpec sampler_spec(const RunConfig& cfg) {
  SamplerSpec spec;
  spec.budget = cfg.budget;
  spec.seed = cfg.seed;
  if (cfg.sampler == "alpha") {
    spec.kind = ProportionalToArea{};
  } else if (cfg.sampler == "rho") {
    spec.kind = PerPointPerComponent{cfg.r};
  } else {
    spec.kind = ConstantPerComponent{cfg.c};
  }
  return spec;
}

void cmd_sample(const RunConfig& cfg) {
  const Trajectory traj = load(cfg.input);
  const auto detections = run_detection(cfg, traj, cfg.epsilon_seconds);
  DetectionGraphConfig graph;
  graph.epsilon = traj.normalized_duration(cfg.epsilon_seconds);
  graph.min_component_size = cfg.min_cluster_size;
  graph.subsample_fraction = cfg.fraction;
  graph.seed = cfg.seed;
  const auto clusters = cluster_detections(detections, graph);
  const auto plan = sample(clusters, sampler_spec(cfg));
  const auto report = coverage_report(plan, clusters);
  const auto dir = prepare_dir(cfg.out);
  io::write_detections_csv(dir / "detections.csv", detections);
  io::write_clusters_csv(dir / "clusters.csv", clusters);
  io::write_sample_plan_csv(dir / "sample_plan.csv", plan);
  io::write_coverage_csv(dir / "coverage.csv", report);
  auto rows = span_rows(traj);
  rows.insert(rows.begin(),
              {{"gamma", io::format_double(cfg.gamma)},
               {"epsilon_seconds", io::format_double(cfg.epsilon_seconds)},
               {"epsilon_normalized", io::format_double(graph.epsilon)},
               {"exclude_band_seconds", io::format_double(cfg.exclude_band_seconds.value_or(cfg.epsilon_seconds))},
               {"fraction", io::format_double(cfg.fraction)},
               {"sampler", sampler_name(plan.sampler.kind)},
               {"budget", std::to_string(cfg.budget)},
               {"seed", std::to_string(cfg.seed)},
               {"detections", std::to_string(detections.size())},
               {"clusters", std::to_string(clusters.size())},
               {"samples", std::to_string(plan.samples.size())},
               {"floor_activations", std::to_string(plan.floor_activations)}});
  io::write_key_values(dir / "run_meta.csv", rows);
}

struct ReportOptions {
  std::string clusters;
  std::string plan;
  std::string out = ".";
};

void cmd_report(const ReportOptions& opts) {
  const auto clusters = io::read_clusters_csv(opts.clusters);
  const auto plan = io::read_sample_plan_csv(opts.plan);
  const auto dir = prepare_dir(opts.out);
  io::write_coverage_csv(dir / "coverage.csv", coverage_report(plan, clusters));
}

struct GenerateOptions {
  std::string kind;
  std::size_t samples = 1000;
  double duration = 0.0;
  std::optional<double> radius, fraction, offset, pitch, turns, length, width;
  std::optional<int> laps;
  std::optional<std::size_t> dim;
  std::string out;
};

void cmd_generate(const GenerateOptions& o) {
  using namespace loopscope::synthetic;
  GeneratorSpec spec;
  spec.samples = o.samples;
  spec.duration_seconds = o.duration;
  if (o.kind == "circle") {
    PartialCircle k;
    k.radius = o.radius.value_or(k.radius);
    k.fraction = o.fraction.value_or(k.fraction);
    spec.kind = k;
  } else if (o.kind == "double_loop") {
    DoubleLoop k;
    k.radius = o.radius.value_or(k.radius);
    k.offset = o.offset.value_or(k.offset);
    spec.kind = k;
  } else if (o.kind == "spiral") {
    Spiral k;
    k.pitch = o.pitch.value_or(k.pitch);
    k.turns = o.turns.value_or(k.turns);
    spec.kind = k;
  } else if (o.kind == "clover") {
    CloverNontrivial k;
    k.length = o.length.value_or(k.length);
    k.width = o.width.value_or(k.width);
    k.laps = o.laps.value_or(k.laps);
    spec.kind = k;
  } else if (o.kind == "torus_circle") {
    spec.kind = TorusCircle{o.radius.value_or(kCircleRadius)};
  } else if (o.kind == "so3_circle") {
    spec.kind = SO3Circle{o.radius.value_or(kCircleRadius)};
  } else {
    Line k;
    k.length = o.length.value_or(k.length);
    k.dim = o.dim.value_or(k.dim);
    spec.kind = k;
  }
  io::write_trajectory(o.out, generate(spec));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"loopscope: inexact loops, loop components, loop measures and loop sampling on trajectories.\n"
               "Times on the command line are raw seconds; library outputs use normalized time in [0, 1].\n"
               "LOOPSCOPE_THREADS caps the worker count."};
  app.require_subcommand(1);

  RunConfig cfg;
  ReportOptions report_opts;
  GenerateOptions gen;

  auto* generate_cmd = app.add_subcommand("generate", "Write a synthetic fixture trajectory");
  generate_cmd->add_option("kind", gen.kind, "circle, double_loop, spiral, clover, torus_circle, so3_circle, line")
      ->required()
      ->check(CLI::IsMember({"circle", "double_loop", "spiral", "clover", "torus_circle", "so3_circle", "line"}));
  generate_cmd->add_option("--samples", gen.samples, "Number of samples")->check(CLI::Range(2, 100000000));
  generate_cmd->add_option("--duration", gen.duration, "Duration in seconds (default: 10 Hz sampling)");
  generate_cmd->add_option("--radius", gen.radius, "Circle radius");
  generate_cmd->add_option("--fraction", gen.fraction, "Fraction of a full turn (circle)");
  generate_cmd->add_option("--offset", gen.offset, "Gap between the two circles (double_loop)");
  generate_cmd->add_option("--pitch", gen.pitch, "Radial growth per turn (spiral)");
  generate_cmd->add_option("--turns", gen.turns, "Number of turns (spiral)");
  generate_cmd->add_option("--length", gen.length, "Length (line) or semi-major axis (clover)");
  generate_cmd->add_option("--width", gen.width, "Semi-minor axis (clover)");
  generate_cmd->add_option("--laps", gen.laps, "Laps (clover)");
  generate_cmd->add_option("--dim", gen.dim, "Dimension (line)");
  generate_cmd->add_option("--out", gen.out, "Output trajectory file")->required();

  auto* field_cmd = app.add_subcommand("field", "Pairwise distance field and gamma mask as PGM rasters");
  auto* components_cmd = app.add_subcommand("components", "Loop component table and label raster");
  auto* measures_cmd = app.add_subcommand("measures", "Loop duration profile, loop area and density");
  for (auto* cmd : {field_cmd, components_cmd, measures_cmd}) {
    add_input(cmd, cfg.input);
    add_gamma(cmd, cfg);
    cmd->add_option("--resolution", cfg.resolution, "Grid side N (default min(samples, 2048))")
        ->check(CLI::Range(std::size_t{2}, std::size_t{65535}));
    add_out_dir(cmd, cfg);
  }
  measures_cmd->add_option("--a", cfg.a, "Window start, normalized time")->check(CLI::Range(0.0, 1.0));
  measures_cmd->add_option("--b", cfg.b, "Window end, normalized time")->check(CLI::Range(0.0, 1.0));

  auto* detect_cmd = app.add_subcommand("detect", "Detect inexact loops with a spatial index");
  auto* sample_cmd = app.add_subcommand("sample", "Detect, cluster and sample inexact loops under a budget");
  for (auto* cmd : {detect_cmd, sample_cmd}) {
    add_input(cmd, cfg.input);
    add_gamma(cmd, cfg);
    cmd->add_option("--exclude-band", cfg.exclude_band_seconds,
                    "Skip pairs closer than this many seconds (detect: 0, sample: --epsilon)");
    cmd->add_option("--fraction", cfg.fraction, "Random detection subsample fraction in (0, 1]")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--seed", cfg.seed, "Random seed");
    add_out_dir(cmd, cfg);
  }
  sample_cmd->add_option("--epsilon", cfg.epsilon_seconds, "Cluster linking distance in seconds")
      ->check(CLI::PositiveNumber);
  sample_cmd->add_option("--sampler", cfg.sampler, "alpha, rho or const")
      ->check(CLI::IsMember({"alpha", "rho", "const"}));
  sample_cmd->add_option("--budget", cfg.budget, "Maximum number of samples")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--c", cfg.c, "Samples per component (const)")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--r", cfg.r, "Samples per component per point (rho)")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--min-cluster-size", cfg.min_cluster_size, "Drop smaller clusters (default 1: keep all)")
      ->check(CLI::PositiveNumber);

  auto* report_cmd = app.add_subcommand("report", "Coverage report for an existing sample plan");
  report_cmd->add_option("--clusters", report_opts.clusters, "clusters.csv")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--plan", report_opts.plan, "sample_plan.csv")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--out", report_opts.out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate_cmd->parsed()) cmd_generate(gen);
    if (field_cmd->parsed()) cmd_field(cfg);
    if (components_cmd->parsed()) cmd_components(cfg);
    if (measures_cmd->parsed()) cmd_measures(cfg);
    if (detect_cmd->parsed()) cmd_detect(cfg);
    if (sample_cmd->parsed()) cmd_sample(cfg);
    if (report_cmd->parsed()) cmd_report(report_opts);
  } catch (const std::exception& e) {
    std::cerr << "loopscope: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
