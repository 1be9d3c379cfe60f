#pragma once

// Loop duration, loop area and loop density over a selection of the
// sublevel set. Integrals are Riemann sums over the mask grid on the full
// square [0, 1]^2 (cell width 1/N), so each measure carries O(1/N) error.

#include <cstddef>
#include <optional>
#include <vector>

#include "loopscope/components.hpp"

namespace loopscope {

enum class Restriction {
  kNone,
  kBegin,  // only pairs with t' >= t: loops that begin at t
  kEnd,    // only pairs with t' <= t: loops that end at t
};

struct MeasureSelection {
  // Empty: the whole sublevel set. Otherwise the listed component ids, each
  // together with its mirror image.
  std::optional<std::vector<int>> component_ids;
  Restriction restriction = Restriction::kNone;

  static MeasureSelection whole(Restriction r = Restriction::kNone) { return {std::nullopt, r}; }
  static MeasureSelection of_components(std::vector<int> ids, Restriction r = Restriction::kNone) {
    return {std::move(ids), r};
  }
};

// Selected cells in grid row `row` (integer form of loop duration).
std::size_t duration_cell_count(const ComponentSet& components, const DistanceField& field,
                                const MeasureSelection& selection, std::size_t row);

// Selected cells in rows [row_begin, row_end).
std::size_t area_cell_count(const ComponentSet& components, const DistanceField& field,
                            const MeasureSelection& selection, std::size_t row_begin, std::size_t row_end);

// tau(t): selected cells in the grid row nearest t, times the cell width.
double loop_duration(const ComponentSet& components, const DistanceField& field,
                     const MeasureSelection& selection, double t);

// alpha(a, b): selected cells in rows [round(aN), round(bN)), times the cell
// area. Throws RangeError unless 0 <= a < b <= 1.
double loop_area(const ComponentSet& components, const DistanceField& field, const MeasureSelection& selection,
                 double a, double b);

// rho(a, b) = alpha(a, b) / (b - a).
double loop_density(const ComponentSet& components, const DistanceField& field,
                    const MeasureSelection& selection, double a, double b);

}  // namespace loopscope
