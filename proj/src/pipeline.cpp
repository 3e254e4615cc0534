#include "skybright/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "skybright/enrich.hpp"
#include "skybright/geo.hpp"
#include "skybright/io.hpp"
#include "skybright/kriging.hpp"
#include "skybright/metrics.hpp"
#include "skybright/skyglow.hpp"
#include "skybright/synth.hpp"
#include "skybright/variogram.hpp"

namespace skybright {

namespace {

namespace fs = std::filesystem;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Context {
  const PipelineConfig& cfg;
  WarningLog& warnings;
  int threads;
  std::string out_dir;
  std::vector<std::string> inputs;   // files read, for the manifest
  std::vector<std::string> outputs;  // files written
  std::vector<std::string> notes;
};

std::string out_path(Context& ctx, const std::string& name) {
  ctx.outputs.push_back(name);
  return (fs::path(ctx.out_dir) / name).string();
}

std::string input_path(Context& ctx, const std::string& key) {
  const std::string path = ctx.cfg.require_path(key);
  ctx.inputs.push_back(path);
  return path;
}

RasterUnits units_from_string(const std::string& s, const std::string& key) {
  if (s == "degrees") return RasterUnits::Degrees;
  if (s == "km") return RasterUnits::Kilometers;
  throw Error("config key '" + key + "' must be 'degrees' or 'km', got '" + s + "'");
}

struct Geometry {
  Boundary boundary;
  Grid grid;
};

Geometry load_geometry(Context& ctx) {
  Geometry g;
  g.boundary = read_boundary(input_path(ctx, "boundary"));
  g.grid = build_grid(g.boundary.polygon, ctx.cfg.get_double("cell_size_km"),
                      &ctx.warnings);
  if (g.grid.cells.empty()) throw Error("prediction grid is empty");
  return g;
}

std::string grid_table_path(Context& ctx) {
  const std::string configured = ctx.cfg.get_string("grid_table");
  const std::string path =
      configured.empty()
          ? (fs::path(ctx.cfg.get_string("output_dir")) / "grid_enriched.csv").string()
          : configured;
  ctx.inputs.push_back(path);
  return path;
}

void load_grid_covariates(Context& ctx, Grid& grid) {
  apply_grid_table(grid, read_grid_table(grid_table_path(ctx)));
}

std::vector<Observation> load_observations(Context& ctx) {
  return read_observations(input_path(ctx, "observations"), ctx.warnings);
}

ModelSpec configured_model(const PipelineConfig& cfg) {
  return {drift_set_from_string(cfg.get_string("model_covariates")),
          cfg.get_bool("model_kriging")};
}

/// Cell-level model data: observations aggregated into their grid cells,
/// valued at cell centers with the cell's covariates. Rows with missing
/// covariates are dropped up front so every model sees the same data.
struct PreparedData {
  ModelData data;
  std::vector<CellAggregate> aggregates;
};

PreparedData prepare_model_data(Context& ctx, const Geometry& geom, const Grid& grid,
                                const std::vector<Observation>& obs) {
  PreparedData out;
  out.aggregates =
      aggregate_to_cells(obs, grid, geom.boundary.projection, ctx.warnings);
  if (out.aggregates.size() < 3) {
    throw Error("need at least 3 populated grid cells, got " +
                std::to_string(out.aggregates.size()));
  }

  ModelData& data = out.data;
  data.covariate_names = grid.covariate_names;
  data.osm_radius_km = ctx.cfg.get_double("osm_model_radius_km");
  data.family = variogram_family_from_string(ctx.cfg.get_string("variogram_family"));
  data.variogram_cutoff_km = ctx.cfg.get_double("variogram_cutoff_km");
  data.variogram_bins = ctx.cfg.get_int("variogram_bins");

  std::vector<double> values;
  std::size_t dropped = 0;
  for (const auto& agg : out.aggregates) {
    const std::size_t cell = static_cast<std::size_t>(agg.cell);
    const auto& row = grid.covariates[cell];
    if (std::any_of(row.begin(), row.end(),
                    [](double v) { return std::isnan(v); })) {
      ++dropped;
      continue;
    }
    data.locations.push_back(grid.cells[cell].center);
    values.push_back(agg.mean);
    data.covariates.push_back(row);
  }
  if (dropped > 0) {
    ctx.warnings.add("model data: dropped " + std::to_string(dropped) +
                     " populated cell(s) with missing covariates");
  }
  data.values = Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
  if (data.locations.size() < 3) {
    throw Error("fewer than 3 usable data cells after covariate screening");
  }
  return out;
}

Raster load_radiance(Context& ctx, const ProjectionSpec& projection) {
  Raster radiance =
      read_raster(input_path(ctx, "radiance"), RasterKind::Continuous,
                  units_from_string(ctx.cfg.get_string("radiance_units"),
                                    "radiance_units"));
  radiance.attach_projection(projection);
  return radiance;
}

SkyglowParams skyglow_params(const PipelineConfig& cfg) {
  return {cfg.get_double("skyglow_exponent"), cfg.get_double("skyglow_min_km"),
          cfg.get_double("skyglow_cutoff_km")};
}

void write_manifest(Context& ctx, const std::string& subcommand) {
  std::ofstream out(fs::path(ctx.out_dir) / ("manifest_" + subcommand + ".txt"));
  if (!out) throw Error("cannot write the run manifest in " + ctx.out_dir);

  std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));

  out << "skybright " << kVersion << " run manifest\n";
  out << "subcommand = " << subcommand << "\n";
  out << "timestamp_utc = " << stamp << "\n";
  out << "threads = " << ctx.threads << "\n";
  out << "\n[config]\n" << ctx.cfg.echo();
  out << "\n[inputs]\n";
  std::vector<std::string> inputs = ctx.inputs;
  std::sort(inputs.begin(), inputs.end());
  inputs.erase(std::unique(inputs.begin(), inputs.end()), inputs.end());
  for (const auto& path : inputs) {
    out << path << " fnv1a64:" << file_digest(path) << "\n";
  }
  out << "\n[outputs]\n";
  for (const auto& name : ctx.outputs) out << name << "\n";
  if (!ctx.notes.empty()) {
    out << "\n[notes]\n";
    for (const auto& note : ctx.notes) out << note << "\n";
  }
  out << "\n[warnings]\ncount = " << ctx.warnings.count() << "\n";
  for (const auto& w : ctx.warnings.messages()) out << w << "\n";
}

// ---------------------------------------------------------------- enrich

void run_enrich(Context& ctx) {
  Geometry geom = load_geometry(ctx);
  Grid& grid = geom.grid;

  const KernelConfig kcfg{ctx.cfg.get_double_list("kernel_radii_km"),
                          ctx.cfg.get_double("kernel_truncation"),
                          ctx.cfg.get_double("line_step_km")};
  const ZonalConfig zcfg{ctx.cfg.get_double("landcover_area_km2")};

  const PolylineSet motorways =
      read_polylines(input_path(ctx, "motorways"), ctx.warnings);
  const PlanarLines lines = project_polylines(motorways, geom.boundary.projection);

  Raster landcover =
      read_raster(input_path(ctx, "landcover"), RasterKind::Categorical,
                  units_from_string(ctx.cfg.get_string("landcover_units"),
                                    "landcover_units"));
  landcover.attach_projection(geom.boundary.projection);

  // Grid cells and observation points take the same enrichment path.
  std::vector<PlanarPoint> centers;
  centers.reserve(grid.cells.size());
  for (const auto& cell : grid.cells) centers.push_back(cell.center);
  const auto cell_covariates =
      enrich_points(centers, lines, landcover, kcfg, zcfg, ctx.warnings, ctx.threads);
  grid.covariate_names = covariate_names(kcfg, landcover);
  grid.covariates = covariate_rows(cell_covariates);
  write_grid(grid, geom.boundary.projection, out_path(ctx, "grid_enriched.csv"));

  const std::vector<Observation> obs = load_observations(ctx);
  std::vector<PlanarPoint> points;
  points.reserve(obs.size());
  for (const auto& o : obs) {
    points.push_back(project(o.location, geom.boundary.projection));
  }
  const auto obs_covariates =
      enrich_points(points, lines, landcover, kcfg, zcfg, ctx.warnings, ctx.threads);
  write_enriched_observations(obs, grid.covariate_names,
                              covariate_rows(obs_covariates),
                              out_path(ctx, "enriched_observations.csv"));
}

// ------------------------------------------------------------------- fit

void run_fit(Context& ctx) {
  Geometry geom = load_geometry(ctx);
  load_grid_covariates(ctx, geom.grid);
  const std::vector<Observation> obs = load_observations(ctx);
  PreparedData prepared = prepare_model_data(ctx, geom, geom.grid, obs);
  ModelData& data = prepared.data;

  const ModelSpec spec = configured_model(ctx.cfg);
  const FittedModel model = fit_model(spec, data, ctx.warnings);

  // The empirical residual variogram is a diagnostic worth having even for
  // non-kriging configurations.
  double cutoff = data.variogram_cutoff_km;
  if (cutoff <= 0.0) {
    double dmax = 0.0;
    for (std::size_t i = 0; i < data.locations.size(); ++i) {
      for (std::size_t j = i + 1; j < data.locations.size(); ++j) {
        dmax = std::max(dmax, distance_km(data.locations[i], data.locations[j]));
      }
    }
    cutoff = dmax / 3.0;
  }
  const std::vector<double> resid(
      model.regression.residuals.data(),
      model.regression.residuals.data() + model.regression.residuals.size());
  const EmpiricalVariogram emp =
      empirical_variogram(data.locations, resid, cutoff, data.variogram_bins);
  VariogramModel vgm = model.variogram;
  if (!spec.kriging) vgm = fit_variogram(emp, data.family, &ctx.warnings);

  {
    std::ofstream out(out_path(ctx, "variogram_bins.csv"));
    out << "lag_km,gamma,pairs\n";
    for (const auto& bin : emp.bins) {
      out << format_number(bin.h_km) << ',' << format_number(bin.gamma) << ','
          << bin.pair_count << "\n";
    }
  }
  {
    std::ofstream out(out_path(ctx, "model_summary.txt"));
    out << "model " << spec.model_id() << ": covariates=" << to_string(spec.covariates)
        << " kriging=" << (spec.kriging ? "yes" : "no") << "\n";
    out << "data cells: " << data.locations.size() << "\n";
    out << "coefficients:\n";
    out << "  intercept " << format_number(model.regression.coefficients[0]) << "\n";
    for (std::size_t k = 0; k < model.drift.columns.size(); ++k) {
      out << "  " << model.drift.columns[k] << ' '
          << format_number(model.regression.coefficients[k + 1]) << "\n";
    }
    out << "residual variance: " << format_number(model.regression.residual_variance)
        << "\n";
    out << "residual variogram (" << to_string(vgm.family)
        << "): nugget " << format_number(vgm.nugget) << ", partial sill "
        << format_number(vgm.partial_sill) << ", range_km "
        << format_number(vgm.range_km) << "\n";
    out << "empirical variogram: cutoff_km " << format_number(cutoff) << ", bins "
        << emp.bins.size() << "\n";
  }
}

// --------------------------------------------------------------- predict

void run_predict(Context& ctx) {
  Geometry geom = load_geometry(ctx);
  load_grid_covariates(ctx, geom.grid);
  const std::vector<Observation> obs = load_observations(ctx);
  PreparedData prepared = prepare_model_data(ctx, geom, geom.grid, obs);

  const ModelSpec spec = configured_model(ctx.cfg);
  const FittedModel model = fit_model(spec, prepared.data, ctx.warnings);
  predict_with_model(geom.grid, model, ctx.warnings, ctx.threads);

  write_grid(geom.grid, geom.boundary.projection, out_path(ctx, "predictions.csv"));
  if (ctx.cfg.get_bool("write_geojson")) {
    write_grid_geojson(geom.grid, geom.boundary.projection,
                       out_path(ctx, "predictions.geojson"));
  }
}

// -------------------------------------------------------------- validate

void run_validate(Context& ctx) {
  Geometry geom = load_geometry(ctx);
  load_grid_covariates(ctx, geom.grid);
  const std::vector<Observation> obs = load_observations(ctx);
  PreparedData prepared = prepare_model_data(ctx, geom, geom.grid, obs);

  const Raster radiance = load_radiance(ctx, geom.boundary.projection);
  const std::vector<double> glow = walker_skyglow(
      radiance, geom.grid, skyglow_params(ctx.cfg), ctx.warnings, ctx.threads);

  const auto specs = ModelSpec::all();
  const std::vector<ValidationReport> reports = compare_models(
      {specs.begin(), specs.end()}, prepared.data, geom.grid, glow,
      prepared.aggregates, ctx.warnings, ctx.threads);

  {
    std::ofstream out(out_path(ctx, "validation.csv"));
    out << reports_to_csv(reports);
  }
  {
    std::ofstream out(out_path(ctx, "validation.txt"));
    out << reports_to_table(reports);
  }
}

// --------------------------------------------------------------- skyglow

void run_skyglow(Context& ctx) {
  Geometry geom = load_geometry(ctx);
  const Raster radiance = load_radiance(ctx, geom.boundary.projection);
  const std::vector<double> glow = walker_skyglow(
      radiance, geom.grid, skyglow_params(ctx.cfg), ctx.warnings, ctx.threads);

  // log is taken per cell where defined; zero skyglow stays empty.
  std::ofstream out(out_path(ctx, "skyglow.csv"));
  out << "cell_id,skyglow,log_skyglow\n";
  for (std::size_t i = 0; i < geom.grid.cells.size(); ++i) {
    const double v = glow[i];
    const double logged = (!std::isnan(v) && v > 0.0) ? std::log(v) : kNaN;
    out << geom.grid.cells[i].index << ',' << format_number(v) << ','
        << format_number(logged) << "\n";
  }
}

// ----------------------------------------------------------------- infer

void run_infer(Context& ctx) {
  Geometry geom = load_geometry(ctx);
  load_grid_covariates(ctx, geom.grid);
  const std::vector<Observation> obs = load_observations(ctx);
  PreparedData prepared = prepare_model_data(ctx, geom, geom.grid, obs);

  const ModelSpec spec = configured_model(ctx.cfg);
  const FittedModel model = fit_model(spec, prepared.data, ctx.warnings);
  predict_with_model(geom.grid, model, ctx.warnings, ctx.threads);

  // Observed cells keep their observed means; prediction uncertainty only
  // applies where the model fills gaps.
  for (const auto& agg : prepared.aggregates) {
    geom.grid.prediction[static_cast<std::size_t>(agg.cell)] = agg.mean;
    geom.grid.prediction_variance[static_cast<std::size_t>(agg.cell)] = 0.0;
  }

  const InferenceResult naive = observed_mean(obs);
  const InferenceResult corrected =
      state_mean(geom.grid.prediction, geom.grid.prediction_variance);

  std::ofstream out(out_path(ctx, "inference.csv"));
  out << "scope,mean,se_between,se_within,se_total,n\n";
  auto row = [&](const char* scope, const InferenceResult& r) {
    out << scope << ',' << format_number(r.mean) << ',' << format_number(r.se_between)
        << ',' << format_number(r.se_within) << ',' << format_number(r.se_total)
        << ',' << r.n << "\n";
  };
  row("observed", naive);
  row("corrected", corrected);
  ctx.notes.push_back("corrected se, linear sum = " +
                      format_number(corrected.se_linear_sum()) +
                      " (se_total combines in quadrature)");
}

// -------------------------------------------------------------- simulate

void run_simulate(Context& ctx) {
  const double cell_km = ctx.cfg.get_double("sim_cell_km");
  const int side = ctx.cfg.get_int("sim_grid_n");
  if (side < 2 || cell_km <= 0.0) {
    throw Error("simulate: need sim_grid_n >= 2 and sim_cell_km > 0");
  }
  const GeoPoint origin{ctx.cfg.get_double("sim_origin_lon"),
                        ctx.cfg.get_double("sim_origin_lat")};
  const ProjectionSpec sim_proj{origin};
  const double half = 0.5 * side * cell_km;

  // Rectangle boundary written as GeoJSON, then read back through the same
  // ingest path later stages use, so the grids agree cell for cell.
  const std::string boundary_path = out_path(ctx, "boundary.geojson");
  {
    nlohmann::json ring = nlohmann::json::array();
    const PlanarPoint corners[5] = {
        {-half, -half}, {half, -half}, {half, half}, {-half, half}, {-half, -half}};
    for (const auto& c : corners) {
      const GeoPoint g = inverse_project(c, sim_proj);
      ring.push_back({g.lon, g.lat});
    }
    const nlohmann::json fc = {
        {"type", "FeatureCollection"},
        {"features",
         {{{"type", "Feature"},
           {"properties", {{"name", "synthetic study area"}}},
           {"geometry",
            {{"type", "Polygon"}, {"coordinates", nlohmann::json::array({ring})}}}}}}};
    std::ofstream out(boundary_path);
    if (!out) throw Error(boundary_path + ": cannot write");
    out << fc.dump(1) << "\n";
  }

  Boundary boundary = read_boundary(boundary_path);
  Grid grid = build_grid(boundary.polygon, cell_km, &ctx.warnings);
  if (grid.cells.size() != static_cast<std::size_t>(side) * side) {
    ctx.warnings.add("simulate: grid has " + std::to_string(grid.cells.size()) +
                     " cells, expected " + std::to_string(side * side));
  }

  // Synthetic covariates shaped like the real ones: an east-west landcover
  // gradient split into two complementary classes and a road-like bump.
  char osm_name[48];
  std::snprintf(osm_name, sizeof(osm_name), "osm_%gkm",
                ctx.cfg.get_double("osm_model_radius_km"));
  grid.covariate_names = {osm_name, "lc_a", "lc_b"};
  const double width = grid.nx * cell_km;
  const double cx = grid.origin.x + 0.5 * width;
  const double cy = grid.origin.y + 0.5 * grid.ny * cell_km;
  const double bump_sd = width / 4.0;
  Eigen::MatrixXd truth_drift(grid.cells.size(), 3);
  grid.covariates.clear();
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    const PlanarPoint c = grid.cells[i].center;
    const double lc_a = (c.x - grid.origin.x) / width;
    const double dx = c.x - cx, dy = c.y - cy;
    const double bump = std::exp(-(dx * dx + dy * dy) / (2.0 * bump_sd * bump_sd));
    grid.covariates.push_back({bump, lc_a, 1.0 - lc_a});
    truth_drift(i, 0) = 1.0;
    truth_drift(i, 1) = lc_a;
    truth_drift(i, 2) = bump;
  }

  const std::vector<double> beta = ctx.cfg.get_double_list("sim_beta");
  if (beta.size() != 3) throw Error("sim_beta needs exactly 3 coefficients");
  SimConfig sim;
  sim.seed = ctx.cfg.get_seed();
  sim.true_coefficients = Eigen::Map<const Eigen::VectorXd>(beta.data(), 3);
  sim.variogram = {variogram_family_from_string(ctx.cfg.get_string("variogram_family")),
                   ctx.cfg.get_double("sim_nugget"), ctx.cfg.get_double("sim_psill"),
                   ctx.cfg.get_double("sim_range_km")};
  sim.n_samples = ctx.cfg.get_int("sim_n_samples");
  sim.noise_sd = ctx.cfg.get_double("sim_noise_sd");

  const Eigen::VectorXd field = simulate_gp_field(grid, truth_drift, sim);

  // Preferential sampling toward high-value (dark-sky) cells.
  const double mean = field.mean();
  const double sd = std::sqrt((field.array() - mean).square().sum() /
                              std::max<Eigen::Index>(1, field.size() - 1));
  const double bias = ctx.cfg.get_double("sim_intensity_bias");
  sim.sampling_intensity =
      ((field.array() - mean) / (sd > 0.0 ? sd : 1.0) * bias).exp();

  const std::vector<SamplePoint> samples = biased_sample(field, grid, sim);
  std::vector<Observation> obs;
  obs.reserve(samples.size());
  for (const auto& s : samples) {
    Observation o;
    o.location = inverse_project(s.location, boundary.projection);
    // The observation schema carries the integer 0-7 chart scale.
    o.brightness =
        static_cast<int>(std::lround(std::min(7.0, std::max(0.0, s.value))));
    obs.push_back(o);
  }
  write_observations(obs, out_path(ctx, "observations.csv"));
  write_grid(grid, boundary.projection, out_path(ctx, "grid_enriched.csv"));

  {
    std::ofstream out(out_path(ctx, "truth.csv"));
    out << "cell_id,true_value\n";
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
      out << grid.cells[i].index << ',' << format_number(field[i]) << "\n";
    }
    ctx.notes.push_back("true state mean = " + format_number(field.mean()));
  }

  // A radiance surface consistent with the truth: darker sky, less light.
  Raster radiance;
  radiance.ncols = grid.nx;
  radiance.nrows = grid.ny;
  radiance.cellsize = cell_km;
  radiance.xll = grid.origin.x;
  radiance.yll = grid.origin.y;
  radiance.kind = RasterKind::Continuous;
  radiance.units = RasterUnits::Kilometers;
  radiance.values.assign(static_cast<std::size_t>(grid.nx) * grid.ny,
                         radiance.nodata);
  for (int row = 0; row < grid.ny; ++row) {
    for (int col = 0; col < grid.nx; ++col) {
      const std::int32_t cell =
          grid.node_cell[static_cast<std::size_t>(row) * grid.nx + col];
      if (cell < 0) continue;
      // Raster rows run top-down while lattice rows run bottom-up.
      const int raster_row = grid.ny - 1 - row;
      radiance.values[static_cast<std::size_t>(raster_row) * grid.nx + col] =
          std::exp(2.0 - 0.8 * field[cell]);
    }
  }
  write_raster(radiance, out_path(ctx, "radiance.asc"));
}

}  // namespace

const std::vector<std::string>& pipeline_subcommands() {
  static const std::vector<std::string> kSubcommands = {
      "enrich", "fit", "predict", "validate", "skyglow", "infer", "simulate"};
  return kSubcommands;
}

void run_pipeline(const std::string& subcommand, const PipelineConfig& config,
                  WarningLog& warnings, int threads) {
  if (threads < 1) throw Error("thread count must be at least 1");
  Context ctx{config, warnings, threads, config.get_string("output_dir"), {}, {}, {}};
  if (ctx.out_dir.empty()) throw Error("output_dir must not be empty");
  fs::create_directories(ctx.out_dir);

  if (subcommand == "enrich") {
    run_enrich(ctx);
  } else if (subcommand == "fit") {
    run_fit(ctx);
  } else if (subcommand == "predict") {
    run_predict(ctx);
  } else if (subcommand == "validate") {
    run_validate(ctx);
  } else if (subcommand == "skyglow") {
    run_skyglow(ctx);
  } else if (subcommand == "infer") {
    run_infer(ctx);
  } else if (subcommand == "simulate") {
    run_simulate(ctx);
  } else {
    throw Error("unknown subcommand '" + subcommand +
                "' (expected enrich, fit, predict, validate, skyglow, infer, or "
                "simulate)");
  }
  write_manifest(ctx, subcommand);
}

}  // namespace skybright
