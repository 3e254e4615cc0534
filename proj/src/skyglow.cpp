#include "skybright/skyglow.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "skybright/parallel.hpp"

namespace skybright {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::vector<double> walker_skyglow(const Raster& radiance, const Grid& grid,
                                   const SkyglowParams& params,
                                   WarningLog& warnings, int threads) {
  if (radiance.kind != RasterKind::Continuous) {
    throw Error("skyglow needs a continuous radiance raster");
  }
  if (params.exponent <= 0.0 || params.min_distance_km <= 0.0 ||
      params.cutoff_km <= params.min_distance_km) {
    throw Error("invalid skyglow parameters: need exponent > 0 and "
                "0 < min distance < cutoff");
  }

  // Bound the per-cell sum by coarsening sub-km rasters to ~1 km blocks.
  const Raster* src = &radiance;
  Raster coarse;
  const int factor =
      std::max(1, static_cast<int>(std::floor(1.0 / radiance.cellsize_km())));
  if (factor > 1) {
    coarse = aggregate_block_mean(radiance, factor);
    if (radiance.units == RasterUnits::Degrees && radiance.has_projection()) {
      // Block centers moved, so the cached planar coordinates must be redone.
      coarse.attach_projection(radiance.projection());
    }
    src = &coarse;
  }

  std::atomic<long> clamped{0};
  std::vector<double> out(grid.cells.size(), kNaN);
  std::vector<char> unreachable(grid.cells.size(), 0);

  parallel_for(grid.cells.size(), threads, [&](std::size_t i) {
    const PlanarPoint center = grid.cells[i].center;
    int col0, col1, row0, row1;
    if (!src->window(center, params.cutoff_km, col0, col1, row0, row1)) {
      unreachable[i] = 1;
      return;
    }
    double acc = 0.0;
    bool any = false;
    for (int row = row0; row <= row1; ++row) {
      for (int col = col0; col <= col1; ++col) {
        double v = src->value(col, row);
        if (src->is_nodata(v)) continue;
        const double d = distance_km(center, src->planar_center(col, row));
        if (d > params.cutoff_km) continue;
        any = true;
        if (v < 0.0) {
          clamped.fetch_add(1, std::memory_order_relaxed);
          v = 0.0;
        }
        acc += std::pow(std::max(d, params.min_distance_km), -params.exponent) * v *
               src->pixel_area_km2(col, row);
      }
    }
    if (any) {
      out[i] = acc;
    } else {
      unreachable[i] = 1;
    }
  });

  if (clamped.load() > 0) {
    warnings.add("skyglow: clamped " + std::to_string(clamped.load()) +
                 " negative radiance value(s) to 0");
  }
  const long n_missing = std::count(unreachable.begin(), unreachable.end(), 1);
  if (n_missing > 0) {
    warnings.add("skyglow: " + std::to_string(n_missing) +
                 " cell(s) have no radiance pixel within the cutoff");
  }
  return out;
}

std::vector<double> log_skyglow(const std::vector<double>& values) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::isnan(values[i])) {
      out[i] = kNaN;
      continue;
    }
    if (values[i] <= 0.0) {
      throw Error("log-skyglow undefined for cell " + std::to_string(i) +
                  " with nonpositive skyglow " + std::to_string(values[i]));
    }
    out[i] = std::log(values[i]);
  }
  return out;
}

}  // namespace skybright
