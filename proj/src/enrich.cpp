#include "skybright/enrich.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "skybright/parallel.hpp"

namespace skybright {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

double ZonalConfig::radius_km() const {
  if (area_km2 <= 0.0) throw Error("zonal area must be positive");
  return std::sqrt(area_km2 / kPi);
}

PlanarLines project_polylines(const PolylineSet& set, const ProjectionSpec& spec) {
  PlanarLines out;
  out.lines.reserve(set.lines.size());
  for (const auto& line : set.lines) {
    std::vector<PlanarPoint> planar;
    planar.reserve(line.size());
    for (const auto& g : line) planar.push_back(project(g, spec));
    out.lines.push_back(std::move(planar));
  }
  return out;
}

SampledLines resample_lines(const PlanarLines& lines, double step_km) {
  if (step_km <= 0.0) throw Error("line sample step must be positive");
  SampledLines out;
  for (const auto& line : lines.lines) {
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
      const PlanarPoint& a = line[i];
      const PlanarPoint& b = line[i + 1];
      const double seg = distance_km(a, b);
      if (seg == 0.0) continue;
      // Midpoint sampling of n equal pieces no longer than step_km.
      const int n = std::max(1, static_cast<int>(std::ceil(seg / step_km)));
      const double piece = seg / n;
      for (int k = 0; k < n; ++k) {
        const double t = (k + 0.5) / n;
        out.samples.push_back(
            {{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}, piece});
      }
      out.total_length_km += seg;
    }
  }
  return out;
}

double kernel_line_density(const SampledLines& sampled, const PlanarPoint& center,
                           double radius_km, double truncation_factor) {
  if (radius_km <= 0.0) throw Error("kernel radius must be positive");
  const double cut = truncation_factor * radius_km;
  const double cut2 = cut * cut;
  const double inv_two_r2 = 1.0 / (2.0 * radius_km * radius_km);
  double acc = 0.0;
  for (const auto& s : sampled.samples) {
    const double dx = s.p.x - center.x;
    const double dy = s.p.y - center.y;
    const double d2 = dx * dx + dy * dy;
    if (d2 > cut2) continue;
    acc += s.length_km * std::exp(-d2 * inv_two_r2);
  }
  return acc;
}

double kernel_line_density(const PlanarLines& lines, const PlanarPoint& center,
                           double radius_km, const KernelConfig& cfg) {
  return kernel_line_density(resample_lines(lines, cfg.line_sample_step_km), center,
                             radius_km, cfg.truncation_factor);
}

std::vector<double> landcover_proportions(const Raster& landcover,
                                          const PlanarPoint& center,
                                          const ZonalConfig& cfg) {
  if (landcover.kind != RasterKind::Categorical) {
    throw Error("land-cover proportions require a categorical raster");
  }
  const std::vector<double>& classes = landcover.classes();
  const double radius = cfg.radius_km();
  const double radius2 = radius * radius;

  int col0, col1, row0, row1;
  std::vector<long> counts(classes.size(), 0);
  long in_zone = 0;
  long valid = 0;
  if (landcover.window(center, radius, col0, col1, row0, row1)) {
    for (int row = row0; row <= row1; ++row) {
      for (int col = col0; col <= col1; ++col) {
        const PlanarPoint p = landcover.planar_center(col, row);
        const double dx = p.x - center.x;
        const double dy = p.y - center.y;
        if (dx * dx + dy * dy > radius2) continue;
        ++in_zone;
        const double v = landcover.value(col, row);
        if (landcover.is_nodata(v)) continue;
        ++valid;
        const auto it = std::lower_bound(classes.begin(), classes.end(), v);
        if (it == classes.end() || *it != v) {
          throw Error("land-cover value " + std::to_string(v) +
                      " is not in the raster's class set");
        }
        ++counts[static_cast<std::size_t>(it - classes.begin())];
      }
    }
  }
  if (valid == 0) {
    throw Error("land-cover zone around (" + std::to_string(center.x) + ", " +
                std::to_string(center.y) + ") km contains no usable pixel");
  }
  std::vector<double> proportions(classes.size());
  for (std::size_t k = 0; k < classes.size(); ++k) {
    proportions[k] = static_cast<double>(counts[k]) / static_cast<double>(in_zone);
  }
  return proportions;
}

std::vector<CovariateVector> enrich_points(const std::vector<PlanarPoint>& points,
                                           const PlanarLines& lines,
                                           const Raster& landcover,
                                           const KernelConfig& kcfg,
                                           const ZonalConfig& zcfg,
                                           WarningLog& warnings, int threads) {
  const SampledLines sampled = resample_lines(lines, kcfg.line_sample_step_km);
  std::vector<CovariateVector> out(points.size());
  std::vector<char> zonal_failed(points.size(), 0);

  parallel_for(points.size(), threads, [&](std::size_t i) {
    CovariateVector& cv = out[i];
    cv.motorway_density.reserve(kcfg.radii_km.size());
    for (double radius : kcfg.radii_km) {
      cv.motorway_density.push_back(
          kernel_line_density(sampled, points[i], radius, kcfg.truncation_factor));
    }
    try {
      cv.landcover_proportion = landcover_proportions(landcover, points[i], zcfg);
    } catch (const Error&) {
      cv.landcover_proportion.assign(landcover.classes().size(), kNaN);
      zonal_failed[i] = 1;
    }
  });

  for (std::size_t i = 0; i < points.size(); ++i) {
    if (zonal_failed[i]) {
      warnings.add("enrich: point " + std::to_string(i) +
                   " has no usable land-cover pixel in its zone; covariates missing");
    }
  }
  return out;
}

std::vector<std::string> covariate_names(const KernelConfig& kcfg,
                                         const Raster& landcover) {
  std::vector<std::string> names;
  char buf[48];
  for (double radius : kcfg.radii_km) {
    std::snprintf(buf, sizeof(buf), "osm_%gkm", radius);
    names.emplace_back(buf);
  }
  for (double cls : landcover.classes()) {
    std::snprintf(buf, sizeof(buf), "lc_%g", cls);
    names.emplace_back(buf);
  }
  return names;
}

std::vector<std::vector<double>> covariate_rows(
    const std::vector<CovariateVector>& covariates) {
  std::vector<std::vector<double>> rows;
  rows.reserve(covariates.size());
  for (const auto& cv : covariates) {
    std::vector<double> row = cv.motorway_density;
    row.insert(row.end(), cv.landcover_proportion.begin(),
               cv.landcover_proportion.end());
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<CellAggregate> aggregate_to_cells(const std::vector<Observation>& obs,
                                              const Grid& grid,
                                              const ProjectionSpec& projection,
                                              WarningLog& warnings) {
  std::map<std::int32_t, std::pair<double, int>> acc;
  std::size_t dropped = 0;
  for (const auto& o : obs) {
    const auto cell = point_to_cell(grid, project(o.location, projection));
    if (!cell) {
      ++dropped;
      continue;
    }
    auto& slot = acc[*cell];
    slot.first += o.brightness;
    slot.second += 1;
  }
  if (dropped > 0) {
    warnings.add("aggregate: dropped " + std::to_string(dropped) +
                 " observation(s) outside the prediction grid");
  }
  std::vector<CellAggregate> out;
  out.reserve(acc.size());
  for (const auto& [cell, sums] : acc) {
    out.push_back({cell, sums.first / sums.second, sums.second});
  }
  return out;
}

}  // namespace skybright
