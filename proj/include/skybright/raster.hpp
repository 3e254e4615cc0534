#pragma once

#include <optional>
#include <vector>

#include "skybright/geo.hpp"
#include "skybright/types.hpp"

namespace skybright {

enum class RasterKind { Categorical, Continuous };

/// Units of the raster's own georeference, not of downstream math (which is
/// always planar km).
enum class RasterUnits { Kilometers, Degrees };

/// Georeferenced regular grid of values, stored in ESRI ASCII order:
/// row 0 is the top (northernmost) row, values row-major.
class Raster {
public:
  int ncols{0};
  int nrows{0};
  double xll{0.0};  // lower-left corner, native units
  double yll{0.0};
  double cellsize{0.0};  // native units
  double nodata{-9999.0};
  RasterKind kind{RasterKind::Continuous};
  RasterUnits units{RasterUnits::Kilometers};
  std::vector<double> values;

  double value(int col, int row) const {
    return values[static_cast<std::size_t>(row) * ncols + col];
  }
  bool is_nodata(double v) const;

  // Pixel-center coordinates in native units.
  double center_x(int col) const { return xll + (col + 0.5) * cellsize; }
  double center_y(int row) const { return yll + (nrows - 1 - row + 0.5) * cellsize; }

  /// Converts pixel centers to planar km. Degree rasters must have a
  /// projection attached first; km rasters are already planar.
  void attach_projection(const ProjectionSpec& spec);
  bool has_projection() const { return projection_.has_value(); }
  const ProjectionSpec& projection() const {
    if (!projection_) throw Error("raster has no attached projection");
    return *projection_;
  }
  PlanarPoint planar_center(int col, int row) const;

  /// Approximate pixel footprint in km^2 (exact for km rasters, spherical
  /// rectangle for degree rasters).
  double pixel_area_km2(int col, int row) const;

  /// Cell size expressed in km (latitude direction for degree rasters).
  double cellsize_km() const;

  /// Sorted distinct non-NODATA values; populated for categorical rasters.
  const std::vector<double>& classes() const { return classes_; }
  void rebuild_classes();

  /// Conservative pixel window around a planar point: all pixels whose
  /// center could lie within radius_km of `center`. Returns false when the
  /// window misses the raster entirely.
  bool window(const PlanarPoint& center, double radius_km, int& col0, int& col1,
              int& row0, int& row1) const;

private:
  std::optional<ProjectionSpec> projection_;
  std::vector<double> planar_x_;  // per pixel, degree rasters only
  std::vector<double> planar_y_;
  std::vector<double> classes_;
};

/// Block-mean downsampling by an integer factor; NODATA pixels are excluded
/// from block means and a block of only NODATA stays NODATA. Categorical
/// rasters cannot be block-averaged.
Raster aggregate_block_mean(const Raster& src, int factor);

}  // namespace skybright
