#pragma once

#include <string>
#include <vector>

#include "skybright/geo.hpp"
#include "skybright/io.hpp"
#include "skybright/raster.hpp"
#include "skybright/types.hpp"

namespace skybright {

/// Gaussian motorway-density kernel. The kernel "radius" is the standard
/// deviation of the Gaussian; contributions beyond truncation_factor sigmas
/// are dropped. Lines are resampled at line_sample_step_km spacing.
struct KernelConfig {
  std::vector<double> radii_km{1.0, 10.0, 25.0};
  double truncation_factor{3.0};
  double line_sample_step_km{0.1};
};

/// Circular land-cover zone; radius is derived as sqrt(area/pi).
struct ZonalConfig {
  double area_km2{25.0};
  double radius_km() const;
};

/// Covariates of one location: kernel-weighted motorway length per radius
/// and a land-cover proportion per raster class. NaN marks a covariate that
/// could not be computed.
struct CovariateVector {
  std::vector<double> motorway_density;      // KernelConfig radii order
  std::vector<double> landcover_proportion;  // raster classes() order
};

/// Polylines projected to the planar frame.
struct PlanarLines {
  std::vector<std::vector<PlanarPoint>> lines;
};

PlanarLines project_polylines(const PolylineSet& set, const ProjectionSpec& spec);

/// Polylines resampled to evenly spaced points, each carrying the length of
/// line it represents. Shared by every kernel evaluation over one line set.
struct SampledLines {
  struct Sample {
    PlanarPoint p;
    double length_km;
  };
  std::vector<Sample> samples;
  double total_length_km{0.0};
};

SampledLines resample_lines(const PlanarLines& lines, double step_km);

/// Kernel-weighted line length around `center`:
///   sum over samples within truncation of  step_len * exp(-d^2 / (2 radius^2)).
double kernel_line_density(const SampledLines& sampled, const PlanarPoint& center,
                           double radius_km, double truncation_factor);

/// Convenience form matching one-off use; resamples internally.
double kernel_line_density(const PlanarLines& lines, const PlanarPoint& center,
                           double radius_km, const KernelConfig& cfg);

/// Per-class fraction of raster pixels whose centers fall in the circular
/// zone, in raster.classes() order. The denominator counts every in-zone
/// pixel, so proportions sum to 1 minus the NODATA fraction. Throws when
/// the zone holds no non-NODATA pixel.
std::vector<double> landcover_proportions(const Raster& landcover,
                                          const PlanarPoint& center,
                                          const ZonalConfig& cfg);

/// Covariates for a batch of points. Zonal failures become NaN rows with a
/// warning; the result always has one CovariateVector per input point.
std::vector<CovariateVector> enrich_points(const std::vector<PlanarPoint>& points,
                                           const PlanarLines& lines,
                                           const Raster& landcover,
                                           const KernelConfig& kcfg,
                                           const ZonalConfig& zcfg,
                                           WarningLog& warnings, int threads = 1);

/// Column names matching the flattened covariate layout:
/// osm_<radius>km per kernel radius, then lc_<class> per raster class.
std::vector<std::string> covariate_names(const KernelConfig& kcfg,
                                         const Raster& landcover);

/// Flatten to rows matching covariate_names().
std::vector<std::vector<double>> covariate_rows(
    const std::vector<CovariateVector>& covariates);

/// Mean observed brightness per populated grid cell.
struct CellAggregate {
  std::int32_t cell{0};
  double mean{0.0};
  int count{0};
};

/// Aggregates observations into their grid cells (arithmetic mean, count),
/// ordered by cell index. Observations outside the grid are dropped with a
/// counted warning.
std::vector<CellAggregate> aggregate_to_cells(const std::vector<Observation>& obs,
                                              const Grid& grid,
                                              const ProjectionSpec& projection,
                                              WarningLog& warnings);

}  // namespace skybright
