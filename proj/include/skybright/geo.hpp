#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "skybright/types.hpp"

namespace skybright {

/// Mean earth radius in km (IUGG R1). All planar math assumes a sphere of
/// this radius; adequate below ~500 km extents where azimuthal-equidistant
/// pairwise distance error stays under 0.5%.
inline constexpr double kEarthRadiusKm = 6371.0088;

/// Forward azimuthal-equidistant projection. Distances from the origin are
/// preserved exactly. Throws for invalid coordinates or the antipode.
PlanarPoint project(const GeoPoint& p, const ProjectionSpec& spec);

/// Inverse of project().
GeoPoint inverse_project(const PlanarPoint& p, const ProjectionSpec& spec);

/// Euclidean distance in km between planar points.
double distance_km(const PlanarPoint& a, const PlanarPoint& b);

/// Planar polygon with an exterior ring and optional hole rings.
/// Rings are closed: first vertex equals last.
struct Polygon {
  std::vector<PlanarPoint> exterior;
  std::vector<std::vector<PlanarPoint>> holes;

  /// Even-odd containment over all rings, so holes are excluded.
  bool contains(const PlanarPoint& p) const;

  /// Shoelace area, holes subtracted. Always >= 0.
  double area_km2() const;

  /// Axis-aligned bounds of the exterior ring.
  void bounds(double& xmin, double& ymin, double& xmax, double& ymax) const;
};

/// True if the closed ring has a proper self-crossing (shared endpoints of
/// adjacent segments do not count).
bool ring_self_intersects(const std::vector<PlanarPoint>& ring);

struct GridCell {
  std::int32_t index{0};
  PlanarPoint center;
};

/// Regular prediction lattice over a boundary polygon. Cells are the
/// axis-aligned squares of the bounding-box lattice whose centers fall
/// inside the polygon; retained cells are numbered sequentially in
/// row-major order (rows bottom to top, columns left to right).
///
/// Covariates, predictions and variances are stored per retained cell;
/// NaN marks a missing entry.
struct Grid {
  double cell_size_km{5.0};
  PlanarPoint origin;  // lower-left corner of the bounding lattice
  int nx{0};
  int ny{0};
  std::vector<std::int32_t> node_cell;  // nx*ny lattice slots, -1 = not retained
  std::vector<GridCell> cells;

  std::vector<std::string> covariate_names;
  std::vector<std::vector<double>> covariates;  // per cell, covariate_names order
  std::vector<double> prediction;               // empty until predicted
  std::vector<double> prediction_variance;

  std::size_t size() const { return cells.size(); }
};

/// Build the prediction grid over `boundary`. Throws on degenerate
/// (zero-area) polygons; an in-bounds polygon that retains no cell is
/// reported through `warnings`.
Grid build_grid(const Polygon& boundary, double cell_size_km,
                WarningLog* warnings = nullptr);

/// Index of the unique cell whose square contains p, or nullopt. Cell edges
/// are half-open: a point on a shared edge belongs to the cell with the
/// larger coordinate index.
std::optional<std::int32_t> point_to_cell(const Grid& grid, const PlanarPoint& p);

}  // namespace skybright
