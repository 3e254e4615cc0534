// Acceptance suite. Runs every gating criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Usage:
//   acceptance_tests <path-to-cli> <scratch-dir>
// Criterion 9 needs the real reference dataset and is skipped unless the
// variable SKYBRIGHT_REFERENCE_DATA points at one (it reports but never gates).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "skybright/config.hpp"
#include "skybright/enrich.hpp"
#include "skybright/geo.hpp"
#include "skybright/io.hpp"
#include "skybright/kriging.hpp"
#include "skybright/metrics.hpp"
#include "skybright/pipeline.hpp"
#include "skybright/skyglow.hpp"
#include "skybright/synth.hpp"
#include "skybright/variogram.hpp"

using namespace skybright;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass{false};
  bool skipped{false};
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Grid square_grid(double extent, double cell) {
  Polygon p;
  p.exterior = {{0, 0}, {extent, 0}, {extent, extent}, {0, extent}, {0, 0}};
  return build_grid(p, cell);
}

// ---------------------------------------------------------------------
// 1. uk_predict matches the dense textbook solve on random instances.
Outcome criterion_oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> coord(0.0, 100.0), val(-2.0, 2.0);
  std::uniform_int_distribution<int> n_dist(6, 20), p_dist(1, 4), fam_dist(0, 2);

  double worst_mean = 0.0, worst_var = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = n_dist(rng);
    const int p = std::min(p_dist(rng), n - 2);
    const auto family = static_cast<VariogramFamily>(fam_dist(rng));

    std::vector<PlanarPoint> locs;
    std::vector<double> values;
    Eigen::MatrixXd drift(n, p);
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) {
      locs.push_back({coord(rng), coord(rng)});
      values.push_back(val(rng));
      z[i] = values.back();
      drift(i, 0) = 1.0;
      for (int k = 1; k < p; ++k) drift(i, k) = val(rng);
    }
    // The gaussian family needs a nugget to stay well-conditioned.
    std::uniform_real_distribution<double> nug(
        family == VariogramFamily::Gaussian ? 0.05 : 0.0, 0.5);
    std::uniform_real_distribution<double> rng_range(5.0, 50.0), psill(0.5, 2.0);
    const VariogramModel vgm{family, nug(rng), psill(rng), rng_range(rng)};

    const KrigingModel model = KrigingModel::fit(locs, z, drift, vgm);
    Eigen::VectorXd f0(p);
    f0[0] = 1.0;
    for (int k = 1; k < p; ++k) f0[k] = val(rng);
    const PlanarPoint target{coord(rng), coord(rng)};

    const PredictionResult fast = model.predict(target, f0);
    const PredictionResult slow =
        dense_kriging_oracle(locs, values, drift, vgm, target, f0);
    worst_mean = std::max(worst_mean, std::abs(fast.mean - slow.mean));
    worst_var = std::max(worst_var, std::abs(fast.variance - slow.variance));
  }
  const double dt = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof(buf), "max |dmean| %.2e, max |dvar| %.2e, %.2f s",
                worst_mean, worst_var, dt);
  return {worst_mean <= 1e-8 && worst_var <= 1e-8 && dt < 5.0, false, buf};
}

// ---------------------------------------------------------------------
// 2. Exactness, unbiasedness, and equivariance on 200 randomized cases.
Outcome criterion_exactness_suite() {
  std::mt19937 rng(4096);
  std::uniform_real_distribution<double> coord(0.0, 80.0), val(-3.0, 3.0);
  std::uniform_int_distribution<int> n_dist(5, 16), p_dist(1, 3), fam_dist(0, 1);
  int failures = 0;
  std::string first_failure;

  for (int trial = 0; trial < 200; ++trial) {
    const int n = n_dist(rng);
    const int p = std::min(p_dist(rng), n - 2);
    const auto family = static_cast<VariogramFamily>(fam_dist(rng));
    const VariogramModel vgm{family, 0.0, 1.0, 25.0};

    std::vector<PlanarPoint> locs;
    Eigen::MatrixXd drift(n, p);
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) {
      locs.push_back({coord(rng), coord(rng)});
      z[i] = val(rng);
      drift(i, 0) = 1.0;
      for (int k = 1; k < p; ++k) drift(i, k) = val(rng);
    }
    auto check = [&](bool ok, const char* what) {
      if (!ok) {
        ++failures;
        if (first_failure.empty()) {
          first_failure = std::string(what) + " at trial " + std::to_string(trial);
        }
      }
    };
    try {
      const KrigingModel model = KrigingModel::fit(locs, z, drift, vgm);

      // Nugget-0 interpolation at every data point.
      for (int i = 0; i < n; ++i) {
        const PredictionResult r = model.predict(locs[i], drift.row(i).transpose());
        check(std::abs(r.mean - z[i]) <= 1e-8, "interpolation mean");
        check(std::abs(r.variance) <= 1e-8, "interpolation variance");
      }

      // Unbiasedness constraints at a random target.
      Eigen::VectorXd f0(p);
      f0[0] = 1.0;
      for (int k = 1; k < p; ++k) f0[k] = val(rng);
      const PlanarPoint target{coord(rng), coord(rng)};
      Eigen::VectorXd lambda, nu;
      model.weights(target, f0, lambda, nu);
      check((model.drift().transpose() * lambda - f0).cwiseAbs().maxCoeff() <= 1e-8,
            "drift reproduction");
      if (p == 1) check(std::abs(lambda.sum() - 1.0) <= 1e-10, "OK weight sum");

      // Translation equivariance.
      const double c = val(rng);
      const KrigingModel shifted =
          KrigingModel::fit(locs, z.array() + c, drift, vgm);
      const PredictionResult r0 = model.predict(target, f0);
      const PredictionResult r1 = shifted.predict(target, f0);
      check(std::abs(r1.mean - (r0.mean + c)) <= 1e-8, "translation mean");
      check(std::abs(r1.variance - r0.variance) <= 1e-8, "translation variance");

      // Scale equivariance with the correspondingly scaled variogram.
      const double s = 2.0 + std::abs(val(rng));
      VariogramModel scaled_vgm = vgm;
      scaled_vgm.partial_sill *= s * s;
      const KrigingModel scaled = KrigingModel::fit(locs, z * s, drift, scaled_vgm);
      const PredictionResult r2 = scaled.predict(target, f0);
      check(std::abs(r2.mean - s * r0.mean) <= 1e-8 * std::max(1.0, std::abs(s * r0.mean)),
            "scale mean");
      check(std::abs(r2.variance - s * s * r0.variance) <=
                1e-8 * std::max(1.0, s * s * r0.variance),
            "scale variance");
    } catch (const Error& e) {
      ++failures;
      if (first_failure.empty()) first_failure = e.what();
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof(buf), "200 cases, %d check failure(s)%s%s", failures,
                failures > 0 ? "; first: " : "",
                failures > 0 ? first_failure.c_str() : "");
  return {failures == 0, false, buf};
}

// ---------------------------------------------------------------------
// 3. Variogram recovery and grid-search dominance.
Outcome criterion_variogram_recovery() {
  const VariogramModel truth{VariogramFamily::Spherical, 0.2, 1.0, 12.0};
  EmpiricalVariogram clean;
  clean.cutoff_km = 20.0;
  clean.n_bins = 15;
  for (int k = 1; k <= 15; ++k) {
    const double h = 20.0 * k / 15.0;
    clean.bins.push_back({h, variogram_value(truth, h), 30});
  }
  const VariogramModel fit = fit_variogram(clean, VariogramFamily::Spherical);
  const double rel_nugget = std::abs(fit.nugget - truth.nugget) / truth.nugget;
  const double rel_psill =
      std::abs(fit.partial_sill - truth.partial_sill) / truth.partial_sill;
  const double rel_range = std::abs(fit.range_km - truth.range_km) / truth.range_km;
  const bool recovered = rel_nugget <= 0.01 && rel_psill <= 0.01 && rel_range <= 0.01;

  // Noisy cases: the optimizer must at least match a 50^3 grid search.
  std::mt19937 rng(512);
  std::normal_distribution<double> noise(0.0, 0.03);
  bool dominates = true;
  for (int rep = 0; rep < 5; ++rep) {
    EmpiricalVariogram noisy = clean;
    for (auto& bin : noisy.bins) bin.gamma = std::max(0.0, bin.gamma + noise(rng));
    const VariogramModel m = fit_variogram(noisy, VariogramFamily::Spherical);
    const double fitted_obj = variogram_wls_objective(noisy, m);

    double gmax = 0.0;
    for (const auto& bin : noisy.bins) gmax = std::max(gmax, bin.gamma);
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 50; ++a) {
      for (int b = 0; b < 50; ++b) {
        for (int c = 0; c < 50; ++c) {
          const VariogramModel g{VariogramFamily::Spherical, 1.5 * gmax * a / 49.0,
                                 2.0 * gmax * b / 49.0,
                                 noisy.cutoff_km * (0.02 + 1.48 * c / 49.0)};
          best = std::min(best, variogram_wls_objective(noisy, g));
        }
      }
    }
    if (fitted_obj > best + 1e-12) dominates = false;
  }
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "rel err nugget %.4f%%, psill %.4f%%, range %.4f%%; grid search %s",
                100 * rel_nugget, 100 * rel_psill, 100 * rel_range,
                dominates ? "dominated" : "NOT dominated");
  return {recovered && dominates, false, buf};
}

// ---------------------------------------------------------------------
// 4. Walker transform: analytic pixels, linearity, monotonicity.
Outcome criterion_walker() {
  WarningLog warnings;
  const Grid cell = square_grid(5.0, 5.0);

  auto one_pixel = [&](double x, double y, double v) {
    Raster r;
    r.ncols = r.nrows = 1;
    r.cellsize = 1.0;
    r.xll = x - 0.5;
    r.yll = y - 0.5;
    r.kind = RasterKind::Continuous;
    r.units = RasterUnits::Kilometers;
    r.values = {v};
    return r;
  };
  // The single cell of this grid is centered at (2.5, 2.5).
  const Raster at10 = one_pixel(12.5, 2.5, 1.0);
  const double glow10 = walker_skyglow(at10, cell, SkyglowParams{}, warnings)[0];
  const bool exact10 = std::abs(glow10 - std::pow(10.0, -2.5)) <= 1e-12;

  const Raster at03 = one_pixel(2.8, 2.5, 3.0);  // 0.3 km, clamped to 1 km
  const double glow03 = walker_skyglow(at03, cell, SkyglowParams{}, warnings)[0];
  const bool clamped = std::abs(glow03 - 3.0) <= 1e-12;

  std::mt19937 rng(77);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  bool linear = true, monotone = true;
  for (int rep = 0; rep < 25; ++rep) {
    Raster r;
    r.ncols = r.nrows = 9;
    r.cellsize = 2.0;
    r.xll = r.yll = -6.5;
    r.kind = RasterKind::Continuous;
    r.units = RasterUnits::Kilometers;
    r.values.resize(81);
    for (auto& v : r.values) v = u(rng);

    const double base = walker_skyglow(r, cell, SkyglowParams{}, warnings)[0];
    Raster scaled = r;
    const double c = 1.0 + u(rng);
    for (auto& v : scaled.values) v *= c;
    const double big = walker_skyglow(scaled, cell, SkyglowParams{}, warnings)[0];
    if (std::abs(big - c * base) > 1e-12 * std::max(1.0, std::abs(c * base))) {
      linear = false;
    }
    Raster more = r;
    more.values[rep * 3 % 81] += u(rng);
    if (walker_skyglow(more, cell, SkyglowParams{}, warnings)[0] < base - 1e-15) {
      monotone = false;
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "10 km pixel err %.1e, clamp err %.1e, linearity %s, monotone %s",
                std::abs(glow10 - std::pow(10.0, -2.5)), std::abs(glow03 - 3.0),
                linear ? "ok" : "BROKEN", monotone ? "ok" : "BROKEN");
  return {exact10 && clamped && linear && monotone, false, buf};
}

// ---------------------------------------------------------------------
// 5. Metric unit values.
Outcome criterion_metrics() {
  bool ok = true;
  std::string detail;

  ok &= spearman({1, 2, 3}, {3, 1, 2}) == -0.5;
  ok &= mse({0, 0}, {1, 3}) == 5.0;
  ok &= mse({1, 2, 3}, {1, 2, 3}) == 0.0;

  // R2 affine invariance at 1e-12.
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(0.5, 6.0);
  std::vector<double> glow(50), pred(50), affine(50);
  for (int i = 0; i < 50; ++i) {
    glow[i] = u(rng);
    pred[i] = u(rng) + 0.4 * std::log(glow[i]);
    affine[i] = -3.0 * pred[i] + 11.0;
  }
  ok &= std::abs(r_squared(pred, glow) - r_squared(affine, glow)) <= 1e-12;

  // Spearman is identical on skyglow and log-skyglow.
  std::vector<double> ranks(50);
  for (int i = 0; i < 50; ++i) ranks[i] = u(rng);
  ok &= spearman(ranks, glow) == spearman(ranks, log_skyglow(glow));

  detail = ok ? "all unit values exact" : "a metric unit value deviated";
  return {ok, false, detail};
}

// ---------------------------------------------------------------------
// 6. LOOCV hand case.
Outcome criterion_loocv_hand_case() {
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(2, 1);
  Eigen::VectorXd y(2);
  y << 0.0, 2.0;
  const double mse_value = loocv_mse_ols(x, y);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "MSE = %.17g", mse_value);
  // Exact up to the final rounding of the QR solve.
  return {std::abs(mse_value - 4.0) <= 1e-14, false, buf};
}

// ---------------------------------------------------------------------
// 7. End-to-end bias correction on seeded synthetic replications.
Outcome criterion_bias_correction() {
  const auto t0 = std::chrono::steady_clock::now();
  const Grid grid = square_grid(75.0, 5.0);  // 15 x 15 = 225 cells
  const std::size_t n_cells = grid.cells.size();

  // Covariates: east-west gradient split into two classes plus a bump.
  std::vector<std::string> names = {"osm_10km", "lc_a", "lc_b"};
  std::vector<std::vector<double>> covariates(n_cells);
  Eigen::MatrixXd truth_drift(n_cells, 3);
  for (std::size_t i = 0; i < n_cells; ++i) {
    const PlanarPoint c = grid.cells[i].center;
    const double lc_a = c.x / 75.0;
    const double bump =
        std::exp(-(std::pow(c.x - 37.5, 2) + std::pow(c.y - 37.5, 2)) /
                 (2.0 * 18.75 * 18.75));
    covariates[i] = {bump, lc_a, 1.0 - lc_a};
    truth_drift(i, 0) = 1.0;
    truth_drift(i, 1) = lc_a;
    truth_drift(i, 2) = bump;
  }

  int wins = 0;
  const int reps = 50;
  for (int rep = 0; rep < reps; ++rep) {
    SimConfig sim;
    sim.seed = 10000 + rep;
    sim.true_coefficients = Eigen::Vector3d(2.0, 2.5, 1.5);
    sim.variogram = {VariogramFamily::Spherical, 0.05, 0.3, 30.0};
    sim.n_samples = 120;
    sim.noise_sd = 0.2;

    const Eigen::VectorXd field = simulate_gp_field(grid, truth_drift, sim);
    const double true_mean = field.mean();

    const double sd = std::sqrt((field.array() - true_mean).square().sum() /
                                (field.size() - 1));
    sim.sampling_intensity = ((field.array() - true_mean) / sd * 1.5).exp();
    const std::vector<SamplePoint> samples = biased_sample(field, grid, sim);

    double naive = 0.0;
    for (const auto& s : samples) naive += s.value / samples.size();

    // Aggregate to cells and fit the combined kriging model.
    std::map<std::int32_t, std::pair<double, int>> agg;
    for (const auto& s : samples) {
      agg[s.cell].first += s.value;
      agg[s.cell].second += 1;
    }
    ModelData data;
    data.covariate_names = names;
    data.osm_radius_km = 10.0;
    data.family = VariogramFamily::Spherical;
    data.variogram_bins = 15;
    std::vector<double> values;
    std::vector<CellAggregate> observed;
    for (const auto& [cell_id, sums] : agg) {
      const std::size_t cell = static_cast<std::size_t>(cell_id);
      data.locations.push_back(grid.cells[cell].center);
      data.covariates.push_back(covariates[cell]);
      values.push_back(sums.first / sums.second);
      observed.push_back({cell_id, sums.first / sums.second, sums.second});
    }
    data.values = Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());

    WarningLog warnings;
    Grid work = grid;
    work.covariate_names = names;
    work.covariates = covariates;
    const FittedModel model =
        fit_model({DriftSet::Combined, true}, data, warnings);
    predict_with_model(work, model, warnings);
    for (const auto& o : observed) {
      work.prediction[static_cast<std::size_t>(o.cell)] = o.mean;
      work.prediction_variance[static_cast<std::size_t>(o.cell)] = 0.0;
    }
    const double corrected =
        state_mean(work.prediction, work.prediction_variance).mean;

    if (std::abs(corrected - true_mean) < std::abs(naive - true_mean)) ++wins;
  }
  const double dt = seconds_since(t0);
  char buf[120];
  std::snprintf(buf, sizeof(buf), "%d/%d replications improved, %.1f s", wins, reps,
                dt);
  return {wins >= 45 && dt < 180.0, false, buf};
}

// ---------------------------------------------------------------------
// 8. Full-pipeline determinism through the CLI.
struct CliRunner {
  std::string cli;
  std::string scratch;

  bool run(const std::string& args) const {
    const std::string cmd = "\"" + cli + "\" " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome criterion_determinism(const CliRunner& cli) {
  const fs::path base = fs::path(cli.scratch) / "determinism";
  fs::remove_all(base);
  fs::create_directories(base);

  auto config_for = [&](const std::string& out_dir, const std::string& seed) {
    const fs::path cfg_path = base / (out_dir + ".conf");
    std::ofstream cfg(cfg_path);
    cfg << "output_dir = " << (base / out_dir).string() << "\n"
        << "seed = " << seed << "\n"
        << "sim_grid_n = 10\n"
        << "sim_n_samples = 100\n"
        << "boundary = " << (base / out_dir / "boundary.geojson").string() << "\n"
        << "observations = " << (base / out_dir / "observations.csv").string() << "\n"
        << "radiance = " << (base / out_dir / "radiance.asc").string() << "\n"
        << "radiance_units = km\n";
    return cfg_path.string();
  };

  // a: reference; b: 8 worker threads; c: rerun of a; d: the config says
  // seed 1 but the CLI overrides it back to 77, which must win.
  struct Run {
    std::string cfg;
    std::string extra;
  };
  const std::vector<Run> runs = {{config_for("a", "77"), "--threads 1"},
                                 {config_for("b", "77"), "--threads 8"},
                                 {config_for("c", "77"), "--threads 1"},
                                 {config_for("d", "1"), "--threads 1 --set seed=77"}};
  for (const Run& run : runs) {
    for (const char* sub : {"simulate", "fit", "predict", "validate", "infer"}) {
      if (!cli.run(std::string(sub) + " -c " + run.cfg + " " + run.extra)) {
        return {false, false, std::string("CLI run failed: ") + sub};
      }
    }
  }

  int compared = 0;
  for (const auto& entry : fs::directory_iterator(base / "a")) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("manifest_", 0) == 0) continue;  // timestamps live here
    ++compared;
    const std::string a = slurp(entry.path());
    if (a != slurp(base / "b" / name)) {
      return {false, false, name + " differs between --threads 1 and --threads 8"};
    }
    if (a != slurp(base / "c" / name)) {
      return {false, false, name + " differs between identical reruns"};
    }
    if (a != slurp(base / "d" / name)) {
      return {false, false, name + " differs when the seed comes from --set"};
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf),
                "%d artifacts byte-identical across reruns, threads, and overrides",
                compared);
  return {compared >= 10, false, buf};
}

// ---------------------------------------------------------------------
// 9. Reproduction against the real dataset (reported, never gating).
Outcome criterion_reference_reproduction() {
  const char* data_dir = std::getenv("SKYBRIGHT_REFERENCE_DATA");
  if (data_dir == nullptr) {
    return {true, true,
            "set SKYBRIGHT_REFERENCE_DATA to a directory with observations.csv, "
            "boundary.geojson, motorways.geojson, landcover.asc, radiance.asc "
            "(see README)"};
  }
  const fs::path dir(data_dir);
  const fs::path out = dir / "reproduction_out";

  try {
    PipelineConfig cfg;
    cfg.set("observations", (dir / "observations.csv").string());
    cfg.set("boundary", (dir / "boundary.geojson").string());
    cfg.set("motorways", (dir / "motorways.geojson").string());
    cfg.set("landcover", (dir / "landcover.asc").string());
    cfg.set("radiance", (dir / "radiance.asc").string());
    cfg.set("output_dir", out.string());
    WarningLog warnings;

    const Boundary boundary = read_boundary((dir / "boundary.geojson").string());
    const Grid grid = build_grid(boundary.polygon, 5.0, &warnings);
    const bool cells_ok =
        std::abs(static_cast<double>(grid.cells.size()) - 4843.0) <= 0.02 * 4843.0;

    const auto obs = read_observations((dir / "observations.csv").string(), warnings);
    const InferenceResult naive = observed_mean(obs);
    const bool observed_ok = std::abs(naive.mean - 2.48) <= 0.01 &&
                             std::abs(naive.se_between - 0.034) <= 0.002;

    run_pipeline("enrich", cfg, warnings);
    run_pipeline("infer", cfg, warnings);
    run_pipeline("validate", cfg, warnings);

    double corrected = 0.0, mse8 = 0.0, rho5 = 0.0;
    {
      std::ifstream in(out / "inference.csv");
      std::string line;
      std::getline(in, line);
      while (std::getline(in, line)) {
        if (line.rfind("corrected,", 0) == 0) {
          corrected = std::strtod(line.c_str() + 10, nullptr);
        }
      }
      std::ifstream vin(out / "validation.csv");
      std::getline(vin, line);
      while (std::getline(vin, line)) {
        std::istringstream row(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (fields.size() >= 6 && fields[0] == "8") {
          mse8 = std::strtod(fields[3].c_str(), nullptr);
        }
        if (fields.size() >= 6 && fields[0] == "5") {
          rho5 = std::strtod(fields[4].c_str(), nullptr);
        }
      }
    }
    const bool corrected_ok = std::abs(corrected - 3.67) <= 0.15;
    const bool mse_ok = std::abs(mse8 - 0.956) <= 0.10;
    const bool rho_ok = std::abs(rho5 - 0.642) <= 0.10;

    char buf[240];
    std::snprintf(buf, sizeof(buf),
                  "cells %zu (%s), observed %.3f+-%.3f (%s), corrected %.3f (%s), "
                  "mse8 %.3f (%s), rho5 %.3f (%s)",
                  grid.cells.size(), cells_ok ? "ok" : "off", naive.mean,
                  naive.se_between, observed_ok ? "ok" : "off", corrected,
                  corrected_ok ? "ok" : "off", mse8, mse_ok ? "ok" : "off", rho5,
                  rho_ok ? "ok" : "off");
    return {cells_ok && observed_ok && corrected_ok && mse_ok && rho_ok, false, buf};
  } catch (const std::exception& e) {
    return {false, false, std::string("reproduction run failed: ") + e.what()};
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: acceptance_tests <path-to-cli> <scratch-dir>\n");
    return 2;
  }
  const CliRunner cli{argv[1], argv[2]};
  fs::create_directories(cli.scratch);

  struct Entry {
    const char* name;
    Outcome outcome;
    bool gating;
  };
  std::vector<Entry> entries;
  entries.push_back({"kriging oracle equivalence", criterion_oracle_equivalence(), true});
  entries.push_back({"exactness and unbiasedness suite", criterion_exactness_suite(), true});
  entries.push_back({"variogram recovery", criterion_variogram_recovery(), true});
  entries.push_back({"walker transform", criterion_walker(), true});
  entries.push_back({"metric unit values", criterion_metrics(), true});
  entries.push_back({"LOOCV hand case", criterion_loocv_hand_case(), true});
  entries.push_back({"end-to-end bias correction", criterion_bias_correction(), true});
  entries.push_back({"pipeline determinism", criterion_determinism(cli), true});
  entries.push_back({"dataset reproduction (non-gating)",
                     criterion_reference_reproduction(), false});

  int gating_failures = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const Entry& e = entries[i];
    const char* verdict =
        e.outcome.skipped ? "SKIP" : (e.outcome.pass ? "PASS" : "FAIL");
    std::printf("criterion %zu: %-36s %s (%s)\n", i + 1, e.name, verdict,
                e.outcome.detail.c_str());
    if (e.gating && !e.outcome.skipped && !e.outcome.pass) ++gating_failures;
  }
  if (gating_failures > 0) {
    std::printf("%d gating criterion(s) failed\n", gating_failures);
    return 1;
  }
  std::printf("all gating criteria passed\n");
  return 0;
}
