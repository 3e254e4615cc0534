#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skybright/geo.hpp"
#include "skybright/raster.hpp"
#include "skybright/types.hpp"

namespace skybright {

/// Set of polylines in geographic coordinates, each with the source
/// feature's tag string.
struct PolylineSet {
  std::vector<std::vector<GeoPoint>> lines;
  std::vector<std::string> tags;  // one per line

  std::size_t size() const { return lines.size(); }
};

/// Study boundary: the projected polygon together with the projection it
/// was built with (azimuthal equidistant about the polygon centroid).
struct Boundary {
  Polygon polygon;
  ProjectionSpec projection;
};

/// Read observations from a CSV with header columns lat,lon,brightness and
/// optional date. Invalid rows are rejected with one warning each.
std::vector<Observation> read_observations(const std::string& path,
                                           WarningLog& warnings);

/// Read a GeoJSON FeatureCollection of LineString/MultiLineString features;
/// MultiLineStrings split into one polyline per part. Non-line geometries
/// are skipped with a warning.
PolylineSet read_polylines(const std::string& path, WarningLog& warnings);

/// Read a GeoJSON Polygon/MultiPolygon (bare geometry, Feature, or
/// FeatureCollection). The largest-area polygon becomes the study boundary,
/// projected about its own centroid.
Boundary read_boundary(const std::string& path);

/// Read an ESRI ASCII grid (keys ncols, nrows, xllcorner/xllcenter,
/// yllcorner/yllcenter, cellsize, NODATA_value; case-insensitive).
Raster read_raster(const std::string& path, RasterKind kind, RasterUnits units);

/// Write an ESRI ASCII grid.
void write_raster(const Raster& raster, const std::string& path);

/// Write the grid as CSV: cell_id,x_km,y_km,lon,lat,pred,var,<covariates...>.
/// Missing values are written as empty fields.
void write_grid(const Grid& grid, const ProjectionSpec& projection,
                const std::string& path);

/// Write the grid cells as a GeoJSON FeatureCollection of square polygons
/// with cell_id/pred/var properties.
void write_grid_geojson(const Grid& grid, const ProjectionSpec& projection,
                        const std::string& path);

/// Covariate (and optional prediction) columns of a grid CSV, keyed by cell_id.
struct GridTable {
  std::vector<std::int32_t> cell_ids;
  std::vector<std::string> covariate_names;
  std::vector<std::vector<double>> covariates;  // row per cell_id
  std::vector<double> prediction;               // NaN when column empty
  std::vector<double> prediction_variance;
};

GridTable read_grid_table(const std::string& path);

/// Merge covariates (and predictions, when present) from `table` into `grid`.
/// Cell ids must match the grid exactly.
void apply_grid_table(Grid& grid, const GridTable& table);

/// Write observations plus per-observation covariates:
/// lat,lon,brightness,<covariates...>.
void write_enriched_observations(const std::vector<Observation>& obs,
                                 const std::vector<std::string>& covariate_names,
                                 const std::vector<std::vector<double>>& covariates,
                                 const std::string& path);

/// Write plain observations in the canonical input schema (lat,lon,brightness).
void write_observations(const std::vector<Observation>& obs, const std::string& path);

/// Shortest decimal text that round-trips a double exactly; empty for NaN.
std::string format_number(double v);

/// FNV-1a 64-bit digest of a file's bytes, as 16 hex characters.
std::string file_digest(const std::string& path);

}  // namespace skybright
