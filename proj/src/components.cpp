#include "loopscope/components.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "loopscope/error.hpp"

namespace loopscope {

namespace {

class DisjointSets {
 public:
  std::int32_t add() {
    parent_.push_back(static_cast<std::int32_t>(parent_.size()));
    return parent_.back();
  }
  std::int32_t find(std::int32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  std::size_t size() const { return parent_.size(); }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent_[a] = b;
  }

 private:
  std::vector<std::int32_t> parent_;
};

struct Run {
  std::size_t begin;  // inclusive
  std::size_t end;    // inclusive
  std::int32_t id;
};

// Flood-fills zero cells reachable from the border, then counts the rest.
int enclosed_zero_regions(std::vector<std::uint8_t>& img, std::size_t rows, std::size_t cols) {
  // 0 = outside, 1 = inside, 2 = visited outside
  std::vector<std::size_t> stack;
  auto fill = [&](std::size_t start) {
    stack.push_back(start);
    img[start] = 2;
    while (!stack.empty()) {
      const std::size_t k = stack.back();
      stack.pop_back();
      const std::size_t r = k / cols;
      const std::size_t c = k % cols;
      auto visit = [&](std::size_t idx) {
        if (img[idx] == 0) {
          img[idx] = 2;
          stack.push_back(idx);
        }
      };
      if (r > 0) visit(k - cols);
      if (r + 1 < rows) visit(k + cols);
      if (c > 0) visit(k - 1);
      if (c + 1 < cols) visit(k + 1);
    }
  };
  for (std::size_t c = 0; c < cols; ++c) {
    if (img[c] == 0) fill(c);
    if (img[(rows - 1) * cols + c] == 0) fill((rows - 1) * cols + c);
  }
  for (std::size_t r = 0; r < rows; ++r) {
    if (img[r * cols] == 0) fill(r * cols);
    if (img[r * cols + cols - 1] == 0) fill(r * cols + cols - 1);
  }
  int holes = 0;
  for (std::size_t k = 0; k < img.size(); ++k) {
    if (img[k] == 0) {
      ++holes;
      fill(k);
    }
  }
  return holes;
}

}  // namespace

std::vector<std::int32_t> label_upper_triangle(std::span<const std::uint8_t> mask, std::size_t n,
                                               std::size_t* component_count) {
  if (mask.size() != n * n) throw ConfigError("mask size must be n * n");
  std::vector<std::int32_t> run_of(n * n, -1);
  DisjointSets sets;
  std::vector<Run> previous;
  std::vector<Run> current;
  for (std::size_t i = 0; i < n; ++i) {
    current.clear();
    const std::uint8_t* row = mask.data() + i * n;
    for (std::size_t j = i; j < n;) {
      if (!row[j]) {
        ++j;
        continue;
      }
      std::size_t end = j;
      while (end + 1 < n && row[end + 1]) ++end;
      const std::int32_t id = sets.add();
      for (std::size_t k = j; k <= end; ++k) run_of[i * n + k] = id;
      current.push_back({j, end, id});
      j = end + 1;
    }
    // Vertical adjacency with the previous row, two-pointer sweep.
    std::size_t a = 0;
    std::size_t b = 0;
    while (a < previous.size() && b < current.size()) {
      const Run& up = previous[a];
      const Run& down = current[b];
      if (std::max(up.begin, down.begin) <= std::min(up.end, down.end)) sets.unite(up.id, down.id);
      if (up.end < down.end) {
        ++a;
      } else {
        ++b;
      }
    }
    if (i > 0 && mask[(i - 1) * n + (i - 1)] && row[i]) {
      sets.unite(run_of[(i - 1) * n + (i - 1)], run_of[i * n + i]);
    }
    std::swap(previous, current);
  }
  std::vector<std::int32_t> final_id(sets.size(), -1);
  std::int32_t next = 0;
  for (std::size_t k = 0; k < n * n; ++k) {
    if (run_of[k] < 0) continue;
    const std::int32_t root = sets.find(run_of[k]);
    if (final_id[root] < 0) final_id[root] = next++;
    run_of[k] = final_id[root];
  }
  if (component_count) *component_count = static_cast<std::size_t>(next);
  return run_of;
}

ComponentSet::ComponentSet(std::vector<LoopComponent> components, std::vector<std::int32_t> labels,
                           std::size_t resolution, double gamma)
    : components_(std::move(components)), labels_(std::move(labels)), resolution_(resolution), gamma_(gamma) {
  for (const auto& c : components_) total_area_ += c.area;
}

ComponentSet extract_components(const DistanceField& field) {
  const std::size_t n = field.resolution();
  std::size_t count = 0;
  auto labels = label_upper_triangle(field.mask(), n, &count);
  std::vector<LoopComponent> components(count);
  std::vector<std::size_t> diagonal_cells(count, 0);
  std::vector<std::uint32_t> i_min(count, std::numeric_limits<std::uint32_t>::max()), i_max(count, 0),
      j_min(count, std::numeric_limits<std::uint32_t>::max()), j_max(count, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const std::int32_t id = labels[i * n + j];
      if (id < 0) continue;
      auto& c = components[id];
      c.cells.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
      if (i == j) ++diagonal_cells[id];
      i_min[id] = std::min<std::uint32_t>(i_min[id], i);
      i_max[id] = std::max<std::uint32_t>(i_max[id], i);
      j_min[id] = std::min<std::uint32_t>(j_min[id], j);
      j_max[id] = std::max<std::uint32_t>(j_max[id], j);
    }
  }
  const auto& times = field.times();
  const double cell_area = field.cell_width() * field.cell_width();
  for (std::size_t id = 0; id < count; ++id) {
    auto& c = components[id];
    c.id = static_cast<int>(id);
    c.is_trivial = diagonal_cells[id] > 0;
    const std::size_t off_diagonal = c.cells.size() - diagonal_cells[id];
    c.area = static_cast<double>(2 * off_diagonal + diagonal_cells[id]) * cell_area;
    c.bbox = {times[i_min[id]], times[i_max[id]], times[j_min[id]], times[j_max[id]]};
  }
  ComponentSet set(std::move(components), std::move(labels), n, field.gamma());
  // Holes and boundaries need the finished label grid.
  for (auto& c : set.components_) {
    c.hole_count = count_holes(c, set);
    c.boundary_cells = component_boundary(c, set);
  }
  return set;
}

bool is_simple(const ComponentSet& components, const DistanceField& field, double t, double t_prime) {
  const std::size_t i = field.index_for_time(t);
  const std::size_t j = field.index_for_time(t_prime);
  if (!field.in_mask(i, j)) throw NotInMaskError();
  return components.label_at(i, j) == components.trivial_id();
}

int count_enclosed_regions(std::span<const std::uint8_t> inside, std::size_t rows, std::size_t cols) {
  if (inside.size() != rows * cols) throw ConfigError("image size must be rows * cols");
  if (rows == 0 || cols == 0) return 0;
  std::vector<std::uint8_t> img(inside.begin(), inside.end());
  for (auto& v : img) v = v ? 1 : 0;
  return enclosed_zero_regions(img, rows, cols);
}

int count_holes(const LoopComponent& component, const ComponentSet& components) {
  if (component.cells.empty()) return 0;
  const std::int32_t id = component.id;
  std::size_t r0, r1, c0, c1;
  if (component.is_trivial) {
    std::uint32_t lo = std::numeric_limits<std::uint32_t>::max();
    std::uint32_t hi = 0;
    for (const auto& cell : component.cells) {
      lo = std::min(lo, cell.i);
      hi = std::max(hi, cell.j);
    }
    r0 = c0 = lo;
    r1 = c1 = hi;
  } else {
    r0 = c0 = std::numeric_limits<std::size_t>::max();
    r1 = c1 = 0;
    for (const auto& cell : component.cells) {
      r0 = std::min<std::size_t>(r0, cell.i);
      r1 = std::max<std::size_t>(r1, cell.i);
      c0 = std::min<std::size_t>(c0, cell.j);
      c1 = std::max<std::size_t>(c1, cell.j);
    }
  }
  // Crop to the bounding box with a one-cell outside frame; everything beyond
  // the box is outside the component and connected to the square's edge.
  const std::size_t rows = r1 - r0 + 3;
  const std::size_t cols = c1 - c0 + 3;
  std::vector<std::uint8_t> img(rows * cols, 0);
  for (std::size_t r = r0; r <= r1; ++r) {
    for (std::size_t c = c0; c <= c1; ++c) {
      const bool member = component.is_trivial ? components.label_at(r, c) == id
                                               : (r <= c && components.label_at(r, c) == id);
      if (member) img[(r - r0 + 1) * cols + (c - c0 + 1)] = 1;
    }
  }
  return enclosed_zero_regions(img, rows, cols);
}

std::vector<GridCell> component_boundary(const LoopComponent& component, const ComponentSet& components) {
  const std::size_t n = components.resolution();
  const std::int32_t id = component.id;
  std::vector<GridCell> boundary;
  for (const auto& cell : component.cells) {
    const std::size_t i = cell.i;
    const std::size_t j = cell.j;
    const bool on_edge = i == 0 || j == 0 || i + 1 == n || j + 1 == n;
    const bool outside_neighbor = (i > 0 && components.label_at(i - 1, j) != id) ||
                                  (i + 1 < n && components.label_at(i + 1, j) != id) ||
                                  (j > 0 && components.label_at(i, j - 1) != id) ||
                                  (j + 1 < n && components.label_at(i, j + 1) != id);
    if (on_edge || outside_neighbor) boundary.push_back(cell);
  }
  return boundary;
}

}  // namespace loopscope
