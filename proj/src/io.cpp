#include "loopscope/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "loopscope/error.hpp"

namespace loopscope::io {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::string> split_whitespace(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream stream(line);
  std::string token;
  while (stream >> token) out.push_back(token);
  return out;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw IoError(path.string(), 0, "cannot open for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError(path.string(), 0, "write failed");
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), 0, "cannot open for reading");
  return in;
}

long long parse_int(const std::string& text, const std::string& path, std::size_t line) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw IoError(path, line, "expected an integer, got '" + text + "'");
  }
  return v;
}

struct Header {
  std::string manifold;
  std::size_t dim = 0;
  std::string metric;
  double w_t = 1.0;
  double w_r = 1.0;
};

Header parse_header(const std::string& line, const std::string& name) {
  Header h;
  const auto tokens = split_whitespace(line);
  for (std::size_t k = 2; k < tokens.size(); ++k) {
    const auto eq = tokens[k].find('=');
    if (eq == std::string::npos) throw IoError(name, 1, "malformed header token '" + tokens[k] + "'");
    const std::string key = tokens[k].substr(0, eq);
    const std::string value = tokens[k].substr(eq + 1);
    if (key == "manifold") {
      h.manifold = value;
    } else if (key == "dim") {
      h.dim = static_cast<std::size_t>(parse_int(value, name, 1));
    } else if (key == "metric") {
      h.metric = value;
    } else if (key == "w_t") {
      h.w_t = parse_double(value, name, 1);
    } else if (key == "w_r") {
      h.w_r = parse_double(value, name, 1);
    } else {
      throw IoError(name, 1, "unknown header key '" + key + "'");
    }
  }
  if (h.manifold == "torus") h.dim = 2;
  if (h.manifold == "so3") h.dim = 3;
  if (h.manifold == "se3") h.dim = 6;
  if (h.manifold == "euclidean" && h.dim == 0) throw IoError(name, 1, "euclidean header needs dim=<n>");
  if (h.manifold != "euclidean" && h.manifold != "torus" && h.manifold != "so3" && h.manifold != "se3") {
    throw IoError(name, 1, "unknown manifold '" + h.manifold + "'");
  }
  if (h.metric.empty()) {
    h.metric = h.manifold == "torus" ? "torus_l2" : h.manifold == "so3" ? "so3_frobenius" : "l2";
  }
  return h;
}

ManifoldPoint make_point(const std::string& manifold, const std::vector<double>& c) {
  if (manifold == "euclidean") return EuclideanPoint{c};
  if (manifold == "torus") return TorusPoint(c[0], c[1]);
  if (manifold == "so3") return Rotation::from_axis_angle(Eigen::Vector3d(c[0], c[1], c[2]));
  return RigidPose{Eigen::Vector3d(c[0], c[1], c[2]), Rotation::from_axis_angle(Eigen::Vector3d(c[3], c[4], c[5]))};
}

Trajectory assemble(const std::string& name, std::vector<double> seconds, std::vector<ManifoldPoint> points,
                    const MetricSpec& metric) {
  if (seconds.size() < 2) throw IoError(name, 0, "trajectory needs at least 2 samples");
  try {
    return Trajectory::from_raw_times(seconds, std::move(points), metric);
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    throw IoError(name, 0, e.what());
  }
}

void check_increasing(const std::vector<double>& seconds, double t, const std::string& name, std::size_t line) {
  if (!std::isfinite(t)) throw IoError(name, line, "timestamp must be finite");
  if (!seconds.empty() && !(t > seconds.back())) throw IoError(name, line, "timestamps must be strictly increasing");
}

Trajectory parse_native(std::istream& in, const std::string& name, const std::string& header_line,
                        std::size_t header_number, const std::optional<MetricSpec>& metric_override) {
  const Header h = parse_header(header_line, name);
  MetricSpec metric;
  try {
    metric = metric_override ? *metric_override : parse_metric(h.metric, h.w_t, h.w_r);
  } catch (const Error& e) {
    throw IoError(name, header_number, e.what());
  }
  std::vector<double> seconds;
  std::vector<ManifoldPoint> points;
  std::string line;
  std::size_t number = header_number;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto fields = split(t, ',');
    if (fields.size() != h.dim + 1) {
      throw IoError(name, number,
                    "expected " + std::to_string(h.dim + 1) + " fields, got " + std::to_string(fields.size()));
    }
    const double ts = parse_double(fields[0], name, number);
    check_increasing(seconds, ts, name, number);
    std::vector<double> coords(h.dim);
    for (std::size_t k = 0; k < h.dim; ++k) coords[k] = parse_double(fields[k + 1], name, number);
    if (!std::all_of(coords.begin(), coords.end(), [](double x) { return std::isfinite(x); })) {
      throw IoError(name, number, "coordinates must be finite");
    }
    seconds.push_back(ts);
    points.push_back(make_point(h.manifold, coords));
  }
  return assemble(name, std::move(seconds), std::move(points), metric);
}

Trajectory parse_tum(std::istream& in, const std::string& name, std::vector<std::string> pending,
                     std::size_t first_number, const std::optional<MetricSpec>& metric_override) {
  const MetricSpec metric = metric_override ? *metric_override : MetricSpec{L2Metric{}};
  std::vector<double> seconds;
  std::vector<ManifoldPoint> points;
  std::size_t number = first_number - 1;
  auto consume = [&](const std::string& raw) {
    ++number;
    const std::string t = trim(raw);
    if (t.empty() || t[0] == '#') return;
    const auto f = split_whitespace(t);
    if (f.size() != 8) {
      throw IoError(name, number, "TUM rows need 8 fields (timestamp tx ty tz qx qy qz qw), got " +
                                      std::to_string(f.size()));
    }
    double v[8];
    for (int k = 0; k < 8; ++k) v[k] = parse_double(f[k], name, number);
    check_increasing(seconds, v[0], name, number);
    const double qn = std::sqrt(v[4] * v[4] + v[5] * v[5] + v[6] * v[6] + v[7] * v[7]);
    if (!(std::fabs(qn - 1.0) <= 1e-6)) throw IoError(name, number, "quaternion is not unit-norm within 1e-6");
    seconds.push_back(v[0]);
    points.push_back(RigidPose{Eigen::Vector3d(v[1], v[2], v[3]), Rotation::from_quaternion(v[7], v[4], v[5], v[6])});
  };
  for (const auto& l : pending) consume(l);
  std::string line;
  while (std::getline(in, line)) consume(line);
  return assemble(name, std::move(seconds), std::move(points), metric);
}

std::string manifold_of(const ManifoldPoint& p) {
  switch (p.index()) {
    case 0: return "euclidean";
    case 1: return "torus";
    case 2: return "so3";
    default: return "se3";
  }
}

std::string table_header(std::ifstream& in, const std::filesystem::path& path, const std::string& expected) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != expected) {
    throw IoError(path.string(), 1, "expected header '" + expected + "'");
  }
  return line;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

double parse_double(const std::string& text, const std::string& path, std::size_t line) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw IoError(path, line, "expected a number, got '" + text + "'");
  }
  return v;
}

Trajectory parse_trajectory(std::istream& in, const std::string& name,
                            const std::optional<MetricSpec>& metric_override) {
  std::string line;
  std::size_t number = 0;
  std::vector<std::string> skipped;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.rfind("# loopscope-trajectory", 0) == 0) return parse_native(in, name, t, number, metric_override);
    skipped.push_back(line);
    if (!t.empty() && t[0] != '#') break;
  }
  if (skipped.empty()) throw IoError(name, 0, "empty trajectory file");
  return parse_tum(in, name, std::move(skipped), 1, metric_override);
}

Trajectory read_trajectory(const std::filesystem::path& path, const std::optional<MetricSpec>& metric_override) {
  std::ifstream in = open_in(path);
  return parse_trajectory(in, path.string(), metric_override);
}

void write_trajectory(std::ostream& out, const Trajectory& trajectory) {
  const auto& first = trajectory.points().front();
  const std::string manifold = manifold_of(first);
  out << "# loopscope-trajectory manifold=" << manifold;
  if (const auto* e = std::get_if<EuclideanPoint>(&first)) out << " dim=" << e->coords.size();
  out << " metric=" << metric_name(trajectory.metric());
  if (const auto* w = std::get_if<SE3WeightedMetric>(&trajectory.metric())) {
    out << " w_t=" << format_double(w->translation_weight) << " w_r=" << format_double(w->rotation_weight);
  }
  out << '\n';
  const auto& times = trajectory.times();
  for (std::size_t k = 0; k < times.size(); ++k) {
    out << format_double(trajectory.raw_time(times[k]));
    const auto& p = trajectory.points()[k];
    auto put = [&](double v) { out << ',' << format_double(v); };
    if (const auto* e = std::get_if<EuclideanPoint>(&p)) {
      for (double c : e->coords) put(c);
    } else if (const auto* tp = std::get_if<TorusPoint>(&p)) {
      put(tp->theta());
      put(tp->phi());
    } else if (const auto* r = std::get_if<Rotation>(&p)) {
      for (int i = 0; i < 3; ++i) put(r->axis_angle()[i]);
    } else {
      const auto& pose = std::get<RigidPose>(p);
      for (int i = 0; i < 3; ++i) put(pose.translation[i]);
      for (int i = 0; i < 3; ++i) put(pose.rotation.axis_angle()[i]);
    }
    out << '\n';
  }
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& trajectory) {
  auto out = open_out(path);
  write_trajectory(out, trajectory);
  finish(out, path);
}

void write_pgm(const std::filesystem::path& path, std::size_t width, std::size_t height,
               std::span<const std::uint16_t> pixels, std::uint16_t max_value) {
  if (pixels.size() != width * height) throw ConfigError("raster size mismatch");
  if (max_value == 0) throw ConfigError("PGM max value must be positive");
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out << "P5\n" << width << ' ' << height << '\n' << max_value << '\n';
  std::vector<char> bytes;
  if (max_value < 256) {
    bytes.reserve(pixels.size());
    for (auto v : pixels) bytes.push_back(static_cast<char>(std::min<std::uint16_t>(v, max_value)));
  } else {
    bytes.reserve(2 * pixels.size());
    for (auto v : pixels) {
      v = std::min(v, max_value);
      bytes.push_back(static_cast<char>(v >> 8));
      bytes.push_back(static_cast<char>(v & 0xff));
    }
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  finish(out, path);
}

std::vector<std::uint16_t> field_raster(const DistanceField& field) {
  const double scale = 2.0 * field.gamma();
  std::vector<std::uint16_t> px(field.values().size());
  for (std::size_t k = 0; k < px.size(); ++k) {
    const double d = field.values()[k];
    double level;
    if (scale > 0.0) {
      level = std::min(d / scale, 1.0);
    } else {
      level = d > 0.0 ? 1.0 : 0.0;
    }
    px[k] = static_cast<std::uint16_t>(std::lround(255.0 * level));
  }
  return px;
}

std::vector<std::uint16_t> mask_raster(const DistanceField& field) {
  std::vector<std::uint16_t> px(field.mask().size());
  for (std::size_t k = 0; k < px.size(); ++k) px[k] = field.mask()[k] ? 255 : 0;
  return px;
}

std::vector<std::uint16_t> label_raster(const ComponentSet& components) {
  const std::size_t n = components.resolution();
  std::vector<std::uint16_t> px(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::int32_t label = components.label_at(i, j);
      px[i * n + j] = static_cast<std::uint16_t>(std::min<std::int32_t>(label + 1, 65535));
    }
  }
  return px;
}

void write_detections_csv(const std::filesystem::path& path, std::span<const Detection> detections) {
  auto out = open_out(path);
  out << "t,t_prime,dist\n";
  for (const auto& d : detections) {
    out << format_double(d.t) << ',' << format_double(d.t_prime) << ',' << format_double(d.dist) << '\n';
  }
  finish(out, path);
}

std::vector<Detection> read_detections_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  table_header(in, path, "t,t_prime,dist");
  std::vector<Detection> out;
  std::string line;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    if (f.size() != 3) throw IoError(path.string(), number, "expected 3 fields");
    out.push_back({parse_double(f[0], path.string(), number), parse_double(f[1], path.string(), number),
                   parse_double(f[2], path.string(), number)});
  }
  return out;
}

void write_clusters_csv(const std::filesystem::path& path, std::span<const DetectionCluster> clusters) {
  auto out = open_out(path);
  out << "t,t_prime,dist,cluster_id\n";
  for (const auto& c : clusters) {
    for (const auto& d : c.detections) {
      out << format_double(d.t) << ',' << format_double(d.t_prime) << ',' << format_double(d.dist) << ',' << c.id
          << '\n';
    }
  }
  finish(out, path);
}

std::vector<DetectionCluster> read_clusters_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  table_header(in, path, "t,t_prime,dist,cluster_id");
  std::map<int, std::vector<Detection>> by_id;
  std::string line;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    if (f.size() != 4) throw IoError(path.string(), number, "expected 4 fields");
    const int id = static_cast<int>(parse_int(f[3], path.string(), number));
    by_id[id].push_back({parse_double(f[0], path.string(), number), parse_double(f[1], path.string(), number),
                         parse_double(f[2], path.string(), number)});
  }
  std::vector<DetectionCluster> out;
  for (auto& [id, dets] : by_id) out.push_back({id, std::move(dets)});
  return out;
}

void write_sample_plan_csv(const std::filesystem::path& path, const SamplePlan& plan) {
  auto out = open_out(path);
  const std::string name = sampler_name(plan.sampler.kind);
  out << "t,t_prime,dist,cluster_id,sampler\n";
  for (const auto& s : plan.samples) {
    out << format_double(s.detection.t) << ',' << format_double(s.detection.t_prime) << ','
        << format_double(s.detection.dist) << ',' << s.cluster_id << ',' << name << '\n';
  }
  finish(out, path);
}

SamplePlan read_sample_plan_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  table_header(in, path, "t,t_prime,dist,cluster_id,sampler");
  SamplePlan plan;
  std::string line;
  std::size_t number = 1;
  std::string sampler;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    if (f.size() != 5) throw IoError(path.string(), number, "expected 5 fields");
    SampledLoop s;
    s.detection = {parse_double(f[0], path.string(), number), parse_double(f[1], path.string(), number),
                   parse_double(f[2], path.string(), number)};
    s.cluster_id = static_cast<int>(parse_int(f[3], path.string(), number));
    if (!sampler.empty() && f[4] != sampler) throw IoError(path.string(), number, "mixed sampler names");
    sampler = f[4];
    plan.samples.push_back(s);
  }
  if (sampler == "const") {
    plan.sampler.kind = ConstantPerComponent{};
  } else if (sampler == "alpha") {
    plan.sampler.kind = ProportionalToArea{};
  } else if (sampler == "rho" || sampler.empty()) {
    plan.sampler.kind = PerPointPerComponent{};
  } else {
    throw IoError(path.string(), 0, "unknown sampler '" + sampler + "'");
  }
  for (const auto& s : plan.samples) {
    if (s.cluster_id >= 0) ++plan.per_cluster_counts[s.cluster_id];
  }
  plan.covered_clusters = plan.per_cluster_counts.size();
  return plan;
}

void write_coverage_csv(const std::filesystem::path& path, const CoverageReport& report) {
  auto out = open_out(path);
  out << "cluster_id,cluster_size,sample_count,min_sample_spacing\n";
  for (const auto& c : report.clusters) {
    out << c.cluster_id << ',' << c.cluster_size << ',' << c.sample_count << ','
        << (c.min_sample_spacing ? format_double(*c.min_sample_spacing) : std::string()) << '\n';
  }
  out << "# coverage_fraction," << format_double(report.coverage_fraction) << '\n';
  out << "# size_count_spearman,"
      << (report.size_count_spearman ? format_double(*report.size_count_spearman) : std::string()) << '\n';
  out << "# floor_activations," << report.floor_activations << '\n';
  finish(out, path);
}

void write_components_csv(const std::filesystem::path& path, const ComponentSet& components) {
  auto out = open_out(path);
  out << "id,is_trivial,area,holes,t_min,t_max,tp_min,tp_max\n";
  for (const auto& c : components.components()) {
    out << c.id << ',' << (c.is_trivial ? "true" : "false") << ',' << format_double(c.area) << ',' << c.hole_count
        << ',' << format_double(c.bbox.t_min) << ',' << format_double(c.bbox.t_max) << ','
        << format_double(c.bbox.tp_min) << ',' << format_double(c.bbox.tp_max) << '\n';
  }
  finish(out, path);
}

void write_key_values(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::string>>& rows) {
  auto out = open_out(path);
  out << "key,value\n";
  for (const auto& [k, v] : rows) out << k << ',' << v << '\n';
  finish(out, path);
}

}  // namespace loopscope::io
