#include "skybright/raster.hpp"

#include <algorithm>
#include <cmath>

namespace skybright {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kKmPerDegree = kEarthRadiusKm * kPi / 180.0;
}  // namespace

bool Raster::is_nodata(double v) const {
  return std::isnan(v) || v == nodata;
}

void Raster::attach_projection(const ProjectionSpec& spec) {
  projection_ = spec;
  if (units != RasterUnits::Degrees) return;
  const std::size_t n = static_cast<std::size_t>(ncols) * nrows;
  planar_x_.resize(n);
  planar_y_.resize(n);
  for (int row = 0; row < nrows; ++row) {
    for (int col = 0; col < ncols; ++col) {
      const PlanarPoint p = project({center_x(col), center_y(row)}, spec);
      const std::size_t i = static_cast<std::size_t>(row) * ncols + col;
      planar_x_[i] = p.x;
      planar_y_[i] = p.y;
    }
  }
}

PlanarPoint Raster::planar_center(int col, int row) const {
  if (units == RasterUnits::Kilometers) {
    return {center_x(col), center_y(row)};
  }
  if (planar_x_.empty()) {
    throw Error("degree raster used in planar math without an attached projection");
  }
  const std::size_t i = static_cast<std::size_t>(row) * ncols + col;
  return {planar_x_[i], planar_y_[i]};
}

double Raster::pixel_area_km2(int col, int row) const {
  (void)col;
  if (units == RasterUnits::Kilometers) {
    return cellsize * cellsize;
  }
  const double lat = center_y(row);
  const double dy = cellsize * kKmPerDegree;
  const double dx = cellsize * kKmPerDegree * std::cos(lat * kPi / 180.0);
  return dx * dy;
}

double Raster::cellsize_km() const {
  return units == RasterUnits::Kilometers ? cellsize : cellsize * kKmPerDegree;
}

void Raster::rebuild_classes() {
  classes_.clear();
  if (kind != RasterKind::Categorical) return;
  for (double v : values) {
    if (!is_nodata(v)) classes_.push_back(v);
  }
  std::sort(classes_.begin(), classes_.end());
  classes_.erase(std::unique(classes_.begin(), classes_.end()), classes_.end());
}

bool Raster::window(const PlanarPoint& center, double radius_km, int& col0,
                    int& col1, int& row0, int& row1) const {
  double xmin, xmax, ymin, ymax;  // native units
  if (units == RasterUnits::Kilometers) {
    xmin = center.x - radius_km;
    xmax = center.x + radius_km;
    ymin = center.y - radius_km;
    ymax = center.y + radius_km;
  } else {
    if (!projection_.has_value()) {
      throw Error("degree raster used in planar math without an attached projection");
    }
    const GeoPoint g = inverse_project(center, *projection_);
    const double dlat = radius_km / kKmPerDegree;
    const double cos_lat = std::max(0.05, std::cos(g.lat * kPi / 180.0));
    // 10% slack absorbs projection distortion at regional extents.
    const double dlon = 1.1 * radius_km / (kKmPerDegree * cos_lat);
    xmin = g.lon - dlon;
    xmax = g.lon + dlon;
    ymin = g.lat - 1.1 * dlat;
    ymax = g.lat + 1.1 * dlat;
  }
  col0 = std::max(0, static_cast<int>(std::floor((xmin - xll) / cellsize - 0.5)));
  col1 = std::min(ncols - 1, static_cast<int>(std::ceil((xmax - xll) / cellsize)));
  // y grows upward but rows count downward from the top.
  const double top = yll + nrows * cellsize;
  row0 = std::max(0, static_cast<int>(std::floor((top - ymax) / cellsize - 0.5)));
  row1 = std::min(nrows - 1, static_cast<int>(std::ceil((top - ymin) / cellsize)));
  return col0 <= col1 && row0 <= row1;
}

Raster aggregate_block_mean(const Raster& src, int factor) {
  if (factor < 1) throw Error("block aggregation factor must be >= 1");
  if (src.kind == RasterKind::Categorical) {
    throw Error("cannot block-average a categorical raster");
  }
  if (factor == 1) return src;

  Raster out;
  out.ncols = (src.ncols + factor - 1) / factor;
  out.nrows = (src.nrows + factor - 1) / factor;
  out.cellsize = src.cellsize * factor;
  out.xll = src.xll;
  // Blocks grow from the top-left pixel, so the lower-left corner moves to
  // keep the top edge fixed.
  out.yll = src.yll + src.nrows * src.cellsize - out.nrows * out.cellsize;
  out.nodata = src.nodata;
  out.kind = src.kind;
  out.units = src.units;
  out.values.assign(static_cast<std::size_t>(out.ncols) * out.nrows, out.nodata);

  for (int row = 0; row < out.nrows; ++row) {
    for (int col = 0; col < out.ncols; ++col) {
      double sum = 0.0;
      int n = 0;
      const int r1 = std::min(src.nrows, (row + 1) * factor);
      const int c1 = std::min(src.ncols, (col + 1) * factor);
      for (int r = row * factor; r < r1; ++r) {
        for (int c = col * factor; c < c1; ++c) {
          const double v = src.value(c, r);
          if (!src.is_nodata(v)) {
            sum += v;
            ++n;
          }
        }
      }
      if (n > 0) {
        out.values[static_cast<std::size_t>(row) * out.ncols + col] = sum / n;
      }
    }
  }
  return out;
}

}  // namespace skybright
