#include "skybright/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace skybright {

namespace {

struct KeyDoc {
  const char* key;
  const char* default_value;
  const char* doc;
};

// The single source of truth for the config surface.
const KeyDoc kKeys[] = {
    {"observations", "", "path: observations CSV (lat,lon,brightness[,date])"},
    {"boundary", "", "path: GeoJSON study-area polygon"},
    {"motorways", "", "path: GeoJSON FeatureCollection of motorway polylines"},
    {"landcover", "", "path: categorical land-cover raster, ESRI ASCII"},
    {"landcover_units", "degrees", "landcover georeference: degrees or km"},
    {"radiance", "", "path: nighttime radiance raster, ESRI ASCII"},
    {"radiance_units", "degrees", "radiance georeference: degrees or km"},
    {"grid_table", "", "path: enriched grid CSV (default <output_dir>/grid_enriched.csv)"},
    {"output_dir", "out", "directory receiving all outputs"},
    {"seed", "1", "random seed for the synthetic generator"},
    {"cell_size_km", "5", "prediction grid cell size"},
    {"kernel_radii_km", "1,10,25", "Gaussian kernel radii for motorway density"},
    {"kernel_truncation", "3", "kernel truncation, in multiples of the radius"},
    {"line_step_km", "0.1", "polyline resampling step"},
    {"landcover_area_km2", "25", "area of the circular land-cover zone"},
    {"variogram_family", "spherical", "spherical, exponential, or gaussian"},
    {"variogram_cutoff_km", "0", "empirical variogram cutoff; 0 = max distance / 3"},
    {"variogram_bins", "15", "number of lag bins"},
    {"model_covariates", "combined", "mean, landuse, osm, or combined"},
    {"model_kriging", "true", "krige residual structure (true/false)"},
    {"osm_model_radius_km", "10", "kernel radius whose density enters the drift"},
    {"skyglow_exponent", "2.5", "inverse-distance attenuation power"},
    {"skyglow_min_km", "1", "distance floor for the attenuation"},
    {"skyglow_cutoff_km", "100", "ignore radiance beyond this distance"},
    {"write_geojson", "false", "also write predictions as GeoJSON cell polygons"},
    {"sim_grid_n", "20", "simulate: cells per grid side"},
    {"sim_cell_km", "5", "simulate: cell size"},
    {"sim_n_samples", "150", "simulate: number of observations drawn"},
    {"sim_noise_sd", "0.3", "simulate: iid observation noise sd"},
    {"sim_intensity_bias", "1.5", "simulate: preferential-sampling strength"},
    {"sim_beta", "2,2.5,-1.5", "simulate: intercept, lc_a, osm coefficients"},
    {"sim_nugget", "0.05", "simulate: variogram nugget"},
    {"sim_psill", "0.3", "simulate: variogram partial sill"},
    {"sim_range_km", "30", "simulate: variogram range"},
    {"sim_origin_lon", "-77.7", "simulate: synthetic region center longitude"},
    {"sim_origin_lat", "40.9", "simulate: synthetic region center latitude"},
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

PipelineConfig::PipelineConfig() {
  for (const auto& k : kKeys) entries_[k.key] = {k.default_value, false};
}

void PipelineConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(path + ": cannot open config file");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(path + ":" + std::to_string(line_no) +
                  ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      set(key, value);
    } catch (const Error& e) {
      throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw Error("unknown config key '" + key + "'");
  }
  it->second = {value, true};
}

bool PipelineConfig::is_set(const std::string& key) const {
  const auto it = entries_.find(key);
  return it != entries_.end() && it->second.set;
}

std::string PipelineConfig::get_string(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw Error("unknown config key '" + key + "'");
  return it->second.value;
}

double PipelineConfig::get_double(const std::string& key) const {
  const std::string s = get_string(key);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw Error("config key '" + key + "' is not a number: '" + s + "'");
  }
  return v;
}

int PipelineConfig::get_int(const std::string& key) const {
  const double v = get_double(key);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) {
    throw Error("config key '" + key + "' is not an integer");
  }
  return i;
}

bool PipelineConfig::get_bool(const std::string& key) const {
  const std::string s = get_string(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw Error("config key '" + key + "' is not a boolean: '" + s + "'");
}

std::uint64_t PipelineConfig::get_seed() const {
  const std::string s = get_string("seed");
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw Error("config key 'seed' is not an unsigned integer: '" + s + "'");
  }
  return v;
}

std::vector<double> PipelineConfig::get_double_list(const std::string& key) const {
  const std::string s = get_string(key);
  std::vector<double> out;
  std::istringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end != item.c_str() + item.size()) {
      throw Error("config key '" + key + "' has a non-numeric entry: '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw Error("config key '" + key + "' is an empty list");
  return out;
}

std::string PipelineConfig::require_path(const std::string& key) const {
  const std::string s = get_string(key);
  if (s.empty()) {
    throw Error("config key '" + key + "' (an input path) is required but not set");
  }
  return s;
}

std::string PipelineConfig::echo() const {
  std::ostringstream out;
  for (const auto& [key, entry] : entries_) {
    out << key << " = " << entry.value << "\n";
  }
  return out.str();
}

std::string PipelineConfig::reference() {
  std::ostringstream out;
  for (const auto& k : kKeys) {
    out << k.key << " (default: "
        << (*k.default_value ? k.default_value : "<required input>") << ")\n    "
        << k.doc << "\n";
  }
  return out.str();
}

}  // namespace skybright
