#include "loopscope/measures.hpp"

#include <cmath>
#include <string>

#include "loopscope/error.hpp"

namespace loopscope {

namespace {

// Per-label selection flags; label -1 (outside the mask) is never selected.
class SelectedLabels {
 public:
  SelectedLabels(const ComponentSet& components, const MeasureSelection& selection)
      : flags_(components.size(), selection.component_ids ? 0 : 1) {
    if (!selection.component_ids) return;
    for (int id : *selection.component_ids) {
      if (id < 0 || static_cast<std::size_t>(id) >= components.size()) {
        throw ConfigError("unknown component id " + std::to_string(id));
      }
      flags_[id] = 1;
    }
  }

  bool operator()(std::int32_t label) const { return label >= 0 && flags_[label]; }

 private:
  std::vector<std::uint8_t> flags_;
};

void check_compatible(const ComponentSet& components, const DistanceField& field) {
  if (components.resolution() != field.resolution()) {
    throw ConfigError("component set and distance field resolutions differ");
  }
}

std::size_t row_count(const ComponentSet& components, const DistanceField& field, const SelectedLabels& selected,
                      Restriction restriction, std::size_t row) {
  const std::size_t n = field.resolution();
  std::size_t begin = 0;
  std::size_t end = n;
  if (restriction == Restriction::kBegin) begin = row;
  if (restriction == Restriction::kEnd) end = row + 1;
  std::size_t count = 0;
  for (std::size_t j = begin; j < end; ++j) {
    if (field.in_mask(row, j) && selected(components.label_at(row, j))) ++count;
  }
  return count;
}

std::size_t snap_boundary(double x, std::size_t n) {
  return static_cast<std::size_t>(std::llround(x * static_cast<double>(n)));
}

}  // namespace

std::size_t duration_cell_count(const ComponentSet& components, const DistanceField& field,
                                const MeasureSelection& selection, std::size_t row) {
  check_compatible(components, field);
  if (row >= field.resolution()) throw RangeError("row outside the grid");
  return row_count(components, field, SelectedLabels(components, selection), selection.restriction, row);
}

std::size_t area_cell_count(const ComponentSet& components, const DistanceField& field,
                            const MeasureSelection& selection, std::size_t row_begin, std::size_t row_end) {
  check_compatible(components, field);
  if (row_end > field.resolution() || row_begin > row_end) throw RangeError("row range outside the grid");
  const SelectedLabels selected(components, selection);
  std::size_t count = 0;
  for (std::size_t row = row_begin; row < row_end; ++row) {
    count += row_count(components, field, selected, selection.restriction, row);
  }
  return count;
}

double loop_duration(const ComponentSet& components, const DistanceField& field,
                     const MeasureSelection& selection, double t) {
  const std::size_t row = field.index_for_time(t);
  return static_cast<double>(duration_cell_count(components, field, selection, row)) * field.cell_width();
}

double loop_area(const ComponentSet& components, const DistanceField& field, const MeasureSelection& selection,
                 double a, double b) {
  if (!(a >= 0.0 && b <= 1.0 && a < b)) throw RangeError("loop area needs 0 <= a < b <= 1");
  const std::size_t n = field.resolution();
  const std::size_t cells = area_cell_count(components, field, selection, snap_boundary(a, n), snap_boundary(b, n));
  return static_cast<double>(cells) * field.cell_width() * field.cell_width();
}

double loop_density(const ComponentSet& components, const DistanceField& field,
                    const MeasureSelection& selection, double a, double b) {
  return loop_area(components, field, selection, a, b) / (b - a);
}

}  // namespace loopscope
