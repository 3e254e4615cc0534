#include "skybright/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace skybright {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    field = trim(field);
    if (field.size() >= 2 && field.front() == '"' && field.back() == '"') {
      field = field.substr(1, field.size() - 2);
    }
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(path + ": cannot open for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(path + ": cannot open for writing");
  return out;
}

json parse_json_file(const std::string& path) {
  std::ifstream in = open_input(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(path + ": malformed JSON: " + e.what());
  }
  return j;
}

GeoPoint json_position(const json& coord, const std::string& path) {
  if (!coord.is_array() || coord.size() < 2 || !coord[0].is_number() ||
      !coord[1].is_number()) {
    throw Error(path + ": GeoJSON position must be a [lon, lat] number pair");
  }
  return {coord[0].get<double>(), coord[1].get<double>()};
}

}  // namespace

std::vector<Observation> read_observations(const std::string& path,
                                           WarningLog& warnings) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw Error(path + ": empty file");

  const std::vector<std::string> header = split_csv(line);
  int lat_col = -1, lon_col = -1, bri_col = -1, date_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = lower(header[i]);
    if (name == "lat" || name == "latitude") lat_col = static_cast<int>(i);
    if (name == "lon" || name == "longitude") lon_col = static_cast<int>(i);
    if (name == "brightness") bri_col = static_cast<int>(i);
    if (name == "date") date_col = static_cast<int>(i);
  }
  if (lat_col < 0) throw Error(path + ": missing required column 'lat'");
  if (lon_col < 0) throw Error(path + ": missing required column 'lon'");
  if (bri_col < 0) throw Error(path + ": missing required column 'brightness'");

  std::vector<Observation> obs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv(line);
    const int needed = std::max(lat_col, std::max(lon_col, bri_col));
    const std::string where = path + ":" + std::to_string(line_no);
    if (static_cast<int>(fields.size()) <= needed) {
      warnings.add(where + ": row rejected, too few fields");
      continue;
    }
    double lat, lon, bri;
    if (!parse_double(fields[lat_col], lat) || !parse_double(fields[lon_col], lon) ||
        lat < -90.0 || lat > 90.0 || lon < -180.0 || lon > 180.0) {
      warnings.add(where + ": row rejected, unparseable coordinate");
      continue;
    }
    if (!parse_double(fields[bri_col], bri) ||
        std::abs(bri - std::round(bri)) > 1e-9 || bri < 0.0 || bri > 7.0) {
      warnings.add(where + ": row rejected, brightness outside the 0-7 scale");
      continue;
    }
    Observation o;
    o.location = {lon, lat};
    o.brightness = static_cast<int>(std::lround(bri));
    if (date_col >= 0 && date_col < static_cast<int>(fields.size())) {
      o.date = fields[date_col];
    }
    obs.push_back(std::move(o));
  }
  return obs;
}

PolylineSet read_polylines(const std::string& path, WarningLog& warnings) {
  const json j = parse_json_file(path);
  if (!j.is_object() || j.value("type", "") != "FeatureCollection") {
    throw Error(path + ": expected a GeoJSON FeatureCollection");
  }
  PolylineSet set;
  const auto features = j.value("features", json::array());

  auto add_line = [&](const json& coords, const std::string& tag) {
    std::vector<GeoPoint> line;
    for (const auto& c : coords) line.push_back(json_position(c, path));
    if (line.size() < 2) {
      warnings.add(path + ": line with fewer than 2 vertices skipped");
      return;
    }
    set.lines.push_back(std::move(line));
    set.tags.push_back(tag);
  };

  for (const auto& feature : features) {
    const json geom = feature.value("geometry", json());
    const std::string tag =
        feature.contains("properties") && feature["properties"].is_object()
            ? feature["properties"].dump()
            : "";
    const std::string type = geom.is_object() ? geom.value("type", "") : "";
    if (type == "LineString") {
      add_line(geom.value("coordinates", json::array()), tag);
    } else if (type == "MultiLineString") {
      for (const auto& part : geom.value("coordinates", json::array())) {
        add_line(part, tag);
      }
    } else {
      warnings.add(path + ": skipped non-line geometry '" +
                   (type.empty() ? "<none>" : type) + "'");
    }
  }
  if (set.lines.empty()) {
    warnings.add(path + ": no line features found");
  }
  return set;
}

namespace {

// Rings of one GeoJSON polygon in geographic coordinates.
struct GeoPolygon {
  std::vector<std::vector<GeoPoint>> rings;  // [0] exterior, rest holes
};

std::vector<GeoPoint> read_ring(const json& coords, const std::string& path) {
  std::vector<GeoPoint> ring;
  for (const auto& c : coords) ring.push_back(json_position(c, path));
  if (ring.size() < 3) throw Error(path + ": polygon ring with fewer than 3 vertices");
  if (ring.front().lon != ring.back().lon || ring.front().lat != ring.back().lat) {
    ring.push_back(ring.front());
  }
  return ring;
}

void collect_polygons(const json& geom, const std::string& path,
                      std::vector<GeoPolygon>& out) {
  const std::string type = geom.is_object() ? geom.value("type", "") : "";
  if (type == "Polygon") {
    GeoPolygon poly;
    for (const auto& ring : geom.value("coordinates", json::array())) {
      poly.rings.push_back(read_ring(ring, path));
    }
    if (!poly.rings.empty()) out.push_back(std::move(poly));
  } else if (type == "MultiPolygon") {
    for (const auto& part : geom.value("coordinates", json::array())) {
      GeoPolygon poly;
      for (const auto& ring : part) poly.rings.push_back(read_ring(ring, path));
      if (!poly.rings.empty()) out.push_back(std::move(poly));
    }
  } else if (type == "Feature") {
    collect_polygons(geom.value("geometry", json()), path, out);
  } else if (type == "FeatureCollection") {
    for (const auto& f : geom.value("features", json::array())) {
      collect_polygons(f, path, out);
    }
  }
}

Polygon project_polygon(const GeoPolygon& gp, const ProjectionSpec& spec) {
  Polygon poly;
  for (std::size_t r = 0; r < gp.rings.size(); ++r) {
    std::vector<PlanarPoint> ring;
    ring.reserve(gp.rings[r].size());
    for (const auto& g : gp.rings[r]) ring.push_back(project(g, spec));
    if (r == 0) {
      poly.exterior = std::move(ring);
    } else {
      poly.holes.push_back(std::move(ring));
    }
  }
  return poly;
}

PlanarPoint ring_centroid(const std::vector<PlanarPoint>& ring) {
  double a = 0.0, cx = 0.0, cy = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const double cross = ring[j].x * ring[i].y - ring[i].x * ring[j].y;
    a += cross;
    cx += (ring[j].x + ring[i].x) * cross;
    cy += (ring[j].y + ring[i].y) * cross;
  }
  if (std::abs(a) < 1e-12) {
    // Degenerate ring: fall back to the vertex mean.
    double sx = 0.0, sy = 0.0;
    for (const auto& v : ring) {
      sx += v.x;
      sy += v.y;
    }
    return {sx / n, sy / n};
  }
  return {cx / (3.0 * a), cy / (3.0 * a)};
}

}  // namespace

Boundary read_boundary(const std::string& path) {
  const json j = parse_json_file(path);
  std::vector<GeoPolygon> polys;
  collect_polygons(j, path, polys);
  if (polys.empty()) throw Error(path + ": no Polygon or MultiPolygon feature found");

  // Tentative projection about the overall vertex mean, used only to rank
  // candidate polygons by area and locate the final centroid.
  double mlon = 0.0, mlat = 0.0;
  std::size_t nv = 0;
  for (const auto& p : polys) {
    for (const auto& g : p.rings[0]) {
      mlon += g.lon;
      mlat += g.lat;
      ++nv;
    }
  }
  const ProjectionSpec tentative{{mlon / nv, mlat / nv}};

  std::size_t best = 0;
  double best_area = -1.0;
  std::vector<Polygon> projected(polys.size());
  for (std::size_t i = 0; i < polys.size(); ++i) {
    projected[i] = project_polygon(polys[i], tentative);
    const double a = projected[i].area_km2();
    if (a > best_area) {
      best_area = a;
      best = i;
    }
  }
  // Validity is settled on the tentative projection: a self-crossing ring
  // has no usable centroid.
  if (ring_self_intersects(projected[best].exterior)) {
    throw Error(path + ": boundary exterior ring is self-intersecting");
  }
  for (const auto& hole : projected[best].holes) {
    if (ring_self_intersects(hole)) {
      throw Error(path + ": boundary hole ring is self-intersecting");
    }
  }
  if (best_area <= 0.0) throw Error(path + ": boundary polygon has zero area");

  const ProjectionSpec projection{
      inverse_project(ring_centroid(projected[best].exterior), tentative)};
  Polygon poly = project_polygon(polys[best], projection);
  return {std::move(poly), projection};
}

Raster read_raster(const std::string& path, RasterKind kind, RasterUnits units) {
  std::ifstream in = open_input(path);
  Raster r;
  r.kind = kind;
  r.units = units;

  bool have_ncols = false, have_nrows = false, have_x = false, have_y = false,
       have_cs = false, x_is_center = false, y_is_center = false;
  std::string token;
  // Header: "key value" pairs until the first numeric token, which starts
  // the data block.
  while (in >> token) {
    double numeric;
    if (parse_double(token, numeric)) {
      r.values.push_back(numeric);
      break;
    }
    const std::string key = lower(token);
    double value;
    if (!(in >> value)) throw Error(path + ": header key '" + token + "' has no value");
    if (key == "ncols") {
      r.ncols = static_cast<int>(value);
      have_ncols = true;
    } else if (key == "nrows") {
      r.nrows = static_cast<int>(value);
      have_nrows = true;
    } else if (key == "xllcorner" || key == "xllcenter") {
      r.xll = value;
      x_is_center = (key == "xllcenter");
      have_x = true;
    } else if (key == "yllcorner" || key == "yllcenter") {
      r.yll = value;
      y_is_center = (key == "yllcenter");
      have_y = true;
    } else if (key == "cellsize") {
      r.cellsize = value;
      have_cs = true;
    } else if (key == "nodata_value") {
      r.nodata = value;
    } else {
      throw Error(path + ": unknown header key '" + token + "'");
    }
  }
  if (!have_ncols || !have_nrows || !have_x || !have_y || !have_cs) {
    throw Error(path + ": incomplete ESRI ASCII header");
  }
  if (r.ncols <= 0 || r.nrows <= 0) throw Error(path + ": nonpositive grid dimensions");
  if (r.cellsize <= 0.0) throw Error(path + ": nonpositive cellsize");
  if (x_is_center) r.xll -= 0.5 * r.cellsize;
  if (y_is_center) r.yll -= 0.5 * r.cellsize;

  double v;
  while (in >> v) r.values.push_back(v);
  const std::size_t expected = static_cast<std::size_t>(r.ncols) * r.nrows;
  if (r.values.size() != expected) {
    throw Error(path + ": expected " + std::to_string(expected) + " values, found " +
                std::to_string(r.values.size()));
  }
  r.rebuild_classes();
  return r;
}

void write_raster(const Raster& raster, const std::string& path) {
  std::ofstream out = open_output(path);
  out << "ncols " << raster.ncols << "\n";
  out << "nrows " << raster.nrows << "\n";
  out << "xllcorner " << format_number(raster.xll) << "\n";
  out << "yllcorner " << format_number(raster.yll) << "\n";
  out << "cellsize " << format_number(raster.cellsize) << "\n";
  out << "NODATA_value " << format_number(raster.nodata) << "\n";
  for (int row = 0; row < raster.nrows; ++row) {
    for (int col = 0; col < raster.ncols; ++col) {
      if (col > 0) out << ' ';
      out << format_number(raster.value(col, row));
    }
    out << "\n";
  }
  if (!out) throw Error(path + ": write failed");
}

namespace {

double cell_field(const std::vector<double>& v, std::size_t i) {
  return i < v.size() ? v[i] : kNaN;
}

}  // namespace

void write_grid(const Grid& grid, const ProjectionSpec& projection,
                const std::string& path) {
  std::ofstream out = open_output(path);
  out << "cell_id,x_km,y_km,lon,lat,pred,var";
  for (const auto& name : grid.covariate_names) out << ',' << name;
  out << "\n";
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    const GridCell& cell = grid.cells[i];
    const GeoPoint g = inverse_project(cell.center, projection);
    out << cell.index << ',' << format_number(cell.center.x) << ','
        << format_number(cell.center.y) << ',' << format_number(g.lon) << ','
        << format_number(g.lat) << ',' << format_number(cell_field(grid.prediction, i))
        << ',' << format_number(cell_field(grid.prediction_variance, i));
    for (std::size_t k = 0; k < grid.covariate_names.size(); ++k) {
      out << ',' << format_number(i < grid.covariates.size() ? grid.covariates[i][k]
                                                             : kNaN);
    }
    out << "\n";
  }
  if (!out) throw Error(path + ": write failed");
}

void write_grid_geojson(const Grid& grid, const ProjectionSpec& projection,
                        const std::string& path) {
  json features = json::array();
  const double h = 0.5 * grid.cell_size_km;
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    const GridCell& cell = grid.cells[i];
    json ring = json::array();
    const PlanarPoint corners[5] = {{cell.center.x - h, cell.center.y - h},
                                    {cell.center.x + h, cell.center.y - h},
                                    {cell.center.x + h, cell.center.y + h},
                                    {cell.center.x - h, cell.center.y + h},
                                    {cell.center.x - h, cell.center.y - h}};
    for (const auto& c : corners) {
      const GeoPoint g = inverse_project(c, projection);
      ring.push_back({g.lon, g.lat});
    }
    json props = {{"cell_id", cell.index}};
    const double pred = cell_field(grid.prediction, i);
    const double var = cell_field(grid.prediction_variance, i);
    if (!std::isnan(pred)) props["pred"] = pred;
    if (!std::isnan(var)) props["var"] = var;
    features.push_back({{"type", "Feature"},
                        {"properties", props},
                        {"geometry",
                         {{"type", "Polygon"}, {"coordinates", json::array({ring})}}}});
  }
  const json fc = {{"type", "FeatureCollection"}, {"features", features}};
  std::ofstream out = open_output(path);
  out << fc.dump(1) << "\n";
  if (!out) throw Error(path + ": write failed");
}

GridTable read_grid_table(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw Error(path + ": empty file");
  const std::vector<std::string> header = split_csv(line);

  const std::vector<std::string> fixed = {"cell_id", "x_km", "y_km", "lon",
                                          "lat",     "pred", "var"};
  if (header.size() < fixed.size()) throw Error(path + ": not a grid CSV");
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    if (header[i] != fixed[i]) {
      throw Error(path + ": expected column '" + fixed[i] + "', found '" + header[i] +
                  "'");
    }
  }
  GridTable table;
  table.covariate_names.assign(header.begin() + fixed.size(), header.end());

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != header.size()) {
      throw Error(path + ":" + std::to_string(line_no) + ": wrong field count");
    }
    double id;
    if (!parse_double(fields[0], id)) {
      throw Error(path + ":" + std::to_string(line_no) + ": bad cell_id");
    }
    table.cell_ids.push_back(static_cast<std::int32_t>(id));
    auto opt_field = [&](std::size_t i) {
      double v;
      return parse_double(fields[i], v) ? v : kNaN;
    };
    table.prediction.push_back(opt_field(5));
    table.prediction_variance.push_back(opt_field(6));
    std::vector<double> row;
    row.reserve(table.covariate_names.size());
    for (std::size_t i = fixed.size(); i < fields.size(); ++i) {
      row.push_back(opt_field(i));
    }
    table.covariates.push_back(std::move(row));
  }
  return table;
}

void apply_grid_table(Grid& grid, const GridTable& table) {
  if (table.cell_ids.size() != grid.cells.size()) {
    throw Error("grid CSV has " + std::to_string(table.cell_ids.size()) +
                " cells but the configured grid has " +
                std::to_string(grid.cells.size()) +
                "; rebuild with matching boundary and cell size");
  }
  for (std::size_t i = 0; i < table.cell_ids.size(); ++i) {
    if (table.cell_ids[i] != grid.cells[i].index) {
      throw Error("grid CSV cell_id mismatch at row " + std::to_string(i + 2));
    }
  }
  grid.covariate_names = table.covariate_names;
  grid.covariates = table.covariates;
  const bool any_pred = std::any_of(table.prediction.begin(), table.prediction.end(),
                                    [](double v) { return !std::isnan(v); });
  if (any_pred) {
    grid.prediction = table.prediction;
    grid.prediction_variance = table.prediction_variance;
  }
}

void write_enriched_observations(const std::vector<Observation>& obs,
                                 const std::vector<std::string>& covariate_names,
                                 const std::vector<std::vector<double>>& covariates,
                                 const std::string& path) {
  if (covariates.size() != obs.size()) {
    throw Error("covariate rows do not match observation count");
  }
  std::ofstream out = open_output(path);
  out << "lat,lon,brightness";
  for (const auto& name : covariate_names) out << ',' << name;
  out << "\n";
  for (std::size_t i = 0; i < obs.size(); ++i) {
    out << format_number(obs[i].location.lat) << ','
        << format_number(obs[i].location.lon) << ',' << obs[i].brightness;
    for (double v : covariates[i]) out << ',' << format_number(v);
    out << "\n";
  }
  if (!out) throw Error(path + ": write failed");
}

void write_observations(const std::vector<Observation>& obs, const std::string& path) {
  std::ofstream out = open_output(path);
  out << "lat,lon,brightness\n";
  for (const auto& o : obs) {
    out << format_number(o.location.lat) << ',' << format_number(o.location.lon) << ','
        << o.brightness << "\n";
  }
  if (!out) throw Error(path + ": write failed");
}

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path + ": cannot open for digest");
  std::uint64_t hash = 1469598103934665603ULL;  // FNV-1a offset basis
  char chunk[4096];
  while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(chunk[i]);
      hash *= 1099511628211ULL;
    }
    if (!in) break;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace skybright
