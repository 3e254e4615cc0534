#pragma once

#include <vector>

#include "skybright/geo.hpp"
#include "skybright/raster.hpp"
#include "skybright/types.hpp"

namespace skybright {

/// Inverse-power skyglow attenuation. Contributions scale with
/// max(d, min_distance)^(-exponent); pixels beyond cutoff are ignored.
struct SkyglowParams {
  double exponent{2.5};
  double min_distance_km{1.0};
  double cutoff_km{100.0};
};

/// Expected skyglow per grid cell from a radiance raster:
///   sum over pixels within cutoff of
///     max(d, min_distance)^(-exponent) * radiance * pixel_area.
/// Negative radiance values are clamped to 0 with a counted warning; a cell
/// with no pixel in reach stays NaN with a warning. Rasters finer than 1 km
/// are block-averaged first to bound the sum.
std::vector<double> walker_skyglow(const Raster& radiance, const Grid& grid,
                                   const SkyglowParams& params,
                                   WarningLog& warnings, int threads = 1);

/// Natural log elementwise. NaN (missing) passes through; a nonpositive
/// value is an error naming the cell.
std::vector<double> log_skyglow(const std::vector<double>& values);

}  // namespace skybright
