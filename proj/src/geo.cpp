#include "skybright/geo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace skybright {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;
constexpr double kRadToDeg = 180.0 / kPi;

void check_geo(const GeoPoint& p) {
  if (!std::isfinite(p.lon) || !std::isfinite(p.lat) || p.lon < -180.0 ||
      p.lon > 180.0 || p.lat < -90.0 || p.lat > 90.0) {
    throw Error("invalid geographic coordinate (lon " + std::to_string(p.lon) +
                ", lat " + std::to_string(p.lat) + ")");
  }
}

double clamp1(double v) { return std::max(-1.0, std::min(1.0, v)); }

}  // namespace

PlanarPoint project(const GeoPoint& p, const ProjectionSpec& spec) {
  check_geo(p);
  check_geo(spec.origin);
  const double lam0 = spec.origin.lon * kDegToRad;
  const double phi0 = spec.origin.lat * kDegToRad;
  const double lam = p.lon * kDegToRad;
  const double phi = p.lat * kDegToRad;

  const double dlam = lam - lam0;
  const double cos_c = clamp1(std::sin(phi0) * std::sin(phi) +
                              std::cos(phi0) * std::cos(phi) * std::cos(dlam));
  const double c = std::acos(cos_c);
  if (c < 1e-12) {
    return {0.0, 0.0};
  }
  if (kPi - c < 1e-9) {
    throw Error("cannot project point antipodal to the projection origin");
  }
  const double k = kEarthRadiusKm * c / std::sin(c);
  return {k * std::cos(phi) * std::sin(dlam),
          k * (std::cos(phi0) * std::sin(phi) -
               std::sin(phi0) * std::cos(phi) * std::cos(dlam))};
}

GeoPoint inverse_project(const PlanarPoint& p, const ProjectionSpec& spec) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
    throw Error("cannot inverse-project a non-finite planar point");
  }
  check_geo(spec.origin);
  const double lam0 = spec.origin.lon * kDegToRad;
  const double phi0 = spec.origin.lat * kDegToRad;

  const double rho = std::hypot(p.x, p.y);
  if (rho < 1e-12) {
    return spec.origin;
  }
  const double c = rho / kEarthRadiusKm;
  if (c > kPi) {
    throw Error("planar point lies beyond the antipode of the projection origin");
  }
  const double sin_c = std::sin(c);
  const double cos_c = std::cos(c);
  const double phi =
      std::asin(clamp1(cos_c * std::sin(phi0) + p.y * sin_c * std::cos(phi0) / rho));
  const double lam =
      lam0 + std::atan2(p.x * sin_c,
                        rho * std::cos(phi0) * cos_c - p.y * std::sin(phi0) * sin_c);

  double lon = lam * kRadToDeg;
  if (lon > 180.0) lon -= 360.0;
  if (lon < -180.0) lon += 360.0;
  return {lon, phi * kRadToDeg};
}

double distance_km(const PlanarPoint& a, const PlanarPoint& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

bool Polygon::contains(const PlanarPoint& p) const {
  // Even-odd ray cast toward +x over every ring; a crossing count that is
  // odd overall means inside the exterior and outside any hole.
  bool inside = false;
  auto cast = [&](const std::vector<PlanarPoint>& ring) {
    const std::size_t n = ring.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const PlanarPoint& a = ring[i];
      const PlanarPoint& b = ring[j];
      if ((a.y > p.y) != (b.y > p.y)) {
        const double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
        if (p.x < x_cross) inside = !inside;
      }
    }
  };
  cast(exterior);
  for (const auto& hole : holes) cast(hole);
  return inside;
}

namespace {

double ring_signed_area(const std::vector<PlanarPoint>& ring) {
  double acc = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    acc += ring[j].x * ring[i].y - ring[i].x * ring[j].y;
  }
  return 0.5 * acc;
}

}  // namespace

double Polygon::area_km2() const {
  double a = std::abs(ring_signed_area(exterior));
  for (const auto& hole : holes) a -= std::abs(ring_signed_area(hole));
  return std::max(0.0, a);
}

void Polygon::bounds(double& xmin, double& ymin, double& xmax, double& ymax) const {
  xmin = ymin = std::numeric_limits<double>::infinity();
  xmax = ymax = -std::numeric_limits<double>::infinity();
  for (const auto& v : exterior) {
    xmin = std::min(xmin, v.x);
    xmax = std::max(xmax, v.x);
    ymin = std::min(ymin, v.y);
    ymax = std::max(ymax, v.y);
  }
}

namespace {

int orientation(const PlanarPoint& a, const PlanarPoint& b, const PlanarPoint& c) {
  const double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  if (v > 0) return 1;
  if (v < 0) return -1;
  return 0;
}

bool on_segment(const PlanarPoint& a, const PlanarPoint& b, const PlanarPoint& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_cross(const PlanarPoint& p1, const PlanarPoint& p2,
                    const PlanarPoint& q1, const PlanarPoint& q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

bool same_point(const PlanarPoint& a, const PlanarPoint& b) {
  return a.x == b.x && a.y == b.y;
}

}  // namespace

bool ring_self_intersects(const std::vector<PlanarPoint>& ring) {
  // Segments of the closed ring, excluding the duplicated closing vertex.
  const std::size_t n = ring.size() < 2 ? 0 : ring.size() - 1;
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const PlanarPoint& a1 = ring[i];
    const PlanarPoint& a2 = ring[i + 1];
    for (std::size_t j = i + 1; j < n; ++j) {
      const PlanarPoint& b1 = ring[j];
      const PlanarPoint& b2 = ring[j + 1];
      // Adjacent segments legitimately share one endpoint.
      if (same_point(a2, b1) || same_point(a1, b2) || same_point(a1, b1) ||
          same_point(a2, b2)) {
        continue;
      }
      if (segments_cross(a1, a2, b1, b2)) return true;
    }
  }
  return false;
}

Grid build_grid(const Polygon& boundary, double cell_size_km, WarningLog* warnings) {
  if (cell_size_km <= 0.0 || !std::isfinite(cell_size_km)) {
    throw Error("grid cell size must be a positive number of km");
  }
  if (boundary.exterior.size() < 4) {
    throw Error("boundary polygon needs at least 3 distinct vertices");
  }
  if (boundary.area_km2() <= 0.0) {
    throw Error("boundary polygon has zero area");
  }

  Grid grid;
  grid.cell_size_km = cell_size_km;

  double xmin, ymin, xmax, ymax;
  boundary.bounds(xmin, ymin, xmax, ymax);
  grid.origin = {xmin, ymin};
  grid.nx = std::max(1, static_cast<int>(std::ceil((xmax - xmin) / cell_size_km - 1e-12)));
  grid.ny = std::max(1, static_cast<int>(std::ceil((ymax - ymin) / cell_size_km - 1e-12)));

  grid.node_cell.assign(static_cast<std::size_t>(grid.nx) * grid.ny, -1);
  std::int32_t next = 0;
  for (int row = 0; row < grid.ny; ++row) {
    for (int col = 0; col < grid.nx; ++col) {
      const PlanarPoint center{xmin + (col + 0.5) * cell_size_km,
                               ymin + (row + 0.5) * cell_size_km};
      if (boundary.contains(center)) {
        grid.node_cell[static_cast<std::size_t>(row) * grid.nx + col] = next;
        grid.cells.push_back({next, center});
        ++next;
      }
    }
  }
  if (grid.cells.empty() && warnings != nullptr) {
    warnings->add("grid: boundary polygon contains no cell center at cell size " +
                  std::to_string(cell_size_km) + " km; grid is empty");
  }
  return grid;
}

std::optional<std::int32_t> point_to_cell(const Grid& grid, const PlanarPoint& p) {
  if (grid.nx <= 0 || grid.ny <= 0) return std::nullopt;
  const double fx = (p.x - grid.origin.x) / grid.cell_size_km;
  const double fy = (p.y - grid.origin.y) / grid.cell_size_km;
  const int col = static_cast<int>(std::floor(fx));
  const int row = static_cast<int>(std::floor(fy));
  if (col < 0 || col >= grid.nx || row < 0 || row >= grid.ny) return std::nullopt;
  const std::int32_t cell = grid.node_cell[static_cast<std::size_t>(row) * grid.nx + col];
  if (cell < 0) return std::nullopt;
  return cell;
}

}  // namespace skybright
