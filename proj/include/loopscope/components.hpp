#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "loopscope/trajectory.hpp"

namespace loopscope {

// Grid index pair (row i = t, column j = t').
struct GridCell {
  std::uint32_t i = 0;
  std::uint32_t j = 0;

  auto operator<=>(const GridCell&) const = default;
};

struct BoundingBox {
  double t_min = 0.0;
  double t_max = 0.0;
  double tp_min = 0.0;
  double tp_max = 0.0;
};

// One connected region of the sublevel mask, stored on the upper triangle
// (i <= j); its mirror image is implied.
struct LoopComponent {
  int id = 0;
  std::vector<GridCell> cells;  // sorted, all i <= j
  bool is_trivial = false;      // contains a diagonal cell
  double area = 0.0;            // full-square area of the component and its mirror, time^2
  BoundingBox bbox;             // over the canonical cells
  int hole_count = 0;
  std::vector<GridCell> boundary_cells;
};

class ComponentSet {
 public:
  ComponentSet(std::vector<LoopComponent> components, std::vector<std::int32_t> labels, std::size_t resolution,
               double gamma);

  const std::vector<LoopComponent>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }
  const LoopComponent& operator[](std::size_t k) const { return components_[k]; }

  double gamma() const { return gamma_; }
  std::size_t resolution() const { return resolution_; }
  double total_area() const { return total_area_; }

  // Component id of a cell anywhere in the square (mirrored onto the upper
  // triangle), or -1 when the cell is outside the mask.
  std::int32_t label_at(std::size_t i, std::size_t j) const {
    return i <= j ? labels_[i * resolution_ + j] : labels_[j * resolution_ + i];
  }
  // Id of the component containing the diagonal. Always 0.
  int trivial_id() const { return 0; }

 private:
  friend ComponentSet extract_components(const DistanceField& field);

  std::vector<LoopComponent> components_;
  std::vector<std::int32_t> labels_;
  std::size_t resolution_;
  double gamma_;
  double total_area_ = 0.0;
};

// Labels the true cells of the upper triangle (i <= j) of a square row-major
// mask with 4-neighborhood adjacency, plus a link between consecutive
// diagonal cells (the diagonal is a connected line in the continuum).
// Lower-triangle and false cells get -1; ids are dense and ordered by each
// component's lexicographically smallest cell. Union-find over row runs.
std::vector<std::int32_t> label_upper_triangle(std::span<const std::uint8_t> mask, std::size_t n,
                                               std::size_t* component_count = nullptr);

ComponentSet extract_components(const DistanceField& field);

// True when the loop (t, t') lies in the trivial component. Throws
// NotInMaskError when the pair is not in the mask.
bool is_simple(const ComponentSet& components, const DistanceField& field, double t, double t_prime);

// Holes of a component on the full square: 4-connected regions outside the
// component that it encloses (they do not reach the square's edge). The
// trivial component is measured with its mirror image; a non-trivial
// component's mirror is a separate region and is not included.
int count_holes(const LoopComponent& component, const ComponentSet& components);

// Cells of the component with a 4-neighbor outside it (mirrored), or on the
// square's edge.
std::vector<GridCell> component_boundary(const LoopComponent& component, const ComponentSet& components);

// Counts 4-connected regions of zero cells in a rows x cols image that do
// not touch the image border.
int count_enclosed_regions(std::span<const std::uint8_t> inside, std::size_t rows, std::size_t cols);

}  // namespace loopscope
