#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "skybright/skybright.h"

TEST_CASE("version and config reference are exposed") {
  CHECK(sb_version() != nullptr);
  CHECK(std::strlen(sb_version()) >= 5);
  CHECK(std::string(sb_config_reference()).find("cell_size_km") != std::string::npos);
}

TEST_CASE("variogram handles: create, evaluate, fit") {
  sb_variogram* v = nullptr;
  REQUIRE(sb_variogram_create("spherical", 0.1, 1.0, 10.0, &v) == SB_OK);
  double nugget, psill, range;
  CHECK(sb_variogram_params(v, &nugget, &psill, &range) == SB_OK);
  CHECK(nugget == 0.1);
  CHECK(psill == 1.0);
  CHECK(range == 10.0);
  CHECK(sb_variogram_gamma(v, 0.0) == 0.0);
  CHECK(sb_variogram_gamma(v, 10.0) == doctest::Approx(1.1));
  CHECK(sb_variogram_gamma(v, -1.0) < 0.0);  // error signal
  sb_variogram_free(v);

  CHECK(sb_variogram_create("cubic", 0.0, 1.0, 1.0, &v) ==
        SB_ERROR_INVALID_ARGUMENT);
  CHECK(std::string(sb_last_error()).find("cubic") != std::string::npos);
  CHECK(sb_variogram_create("spherical", -0.1, 1.0, 1.0, &v) ==
        SB_ERROR_INVALID_ARGUMENT);

  // Fit from synthetic samples on a line: enough structure to converge.
  std::vector<double> x, y, z;
  for (int i = 0; i < 40; ++i) {
    x.push_back(i * 1.5);
    y.push_back((i % 7) * 2.0);
    z.push_back(std::sin(0.2 * x.back()) + 0.05 * y.back());
  }
  sb_variogram* fitted = nullptr;
  REQUIRE(sb_variogram_fit(x.data(), y.data(), z.data(), x.size(), "exponential",
                           0.0, 12, &fitted) == SB_OK);
  REQUIRE(fitted != nullptr);
  CHECK(sb_variogram_params(fitted, &nugget, &psill, &range) == SB_OK);
  CHECK(range > 0.0);
  sb_variogram_free(fitted);
}

TEST_CASE("kriging through the C API: exact interpolation and LOOCV") {
  const std::vector<double> x = {0.0, 10.0, 0.0, 10.0, 5.0};
  const std::vector<double> y = {0.0, 0.0, 10.0, 10.0, 5.0};
  const std::vector<double> z = {1.0, 2.0, 3.0, 4.0, 2.5};

  sb_variogram* v = nullptr;
  REQUIRE(sb_variogram_create("spherical", 0.0, 1.0, 15.0, &v) == SB_OK);

  sb_kriging* k = nullptr;
  REQUIRE(sb_kriging_fit(x.data(), y.data(), z.data(), 5, nullptr, 0, v, &k) ==
          SB_OK);

  double mean = 0.0, variance = -1.0;
  for (int i = 0; i < 5; ++i) {
    REQUIRE(sb_kriging_predict(k, x[i], y[i], nullptr, 0, &mean, &variance) == SB_OK);
    CHECK(mean == doctest::Approx(z[i]).epsilon(1e-8));
    CHECK(variance == doctest::Approx(0.0).epsilon(1e-8));
  }
  REQUIRE(sb_kriging_predict(k, 2.0, 2.0, nullptr, 0, &mean, &variance) == SB_OK);
  CHECK(variance > 0.0);

  double loocv = 0.0;
  CHECK(sb_kriging_loocv_mse(k, &loocv) == SB_OK);
  CHECK(loocv > 0.0);

  sb_kriging_free(k);
  sb_variogram_free(v);
}

TEST_CASE("kriging with drift columns through the C API") {
  // z is exactly linear in the drift column; kriging must reproduce it.
  std::vector<double> x, y, z, drift;
  for (int i = 0; i < 12; ++i) {
    x.push_back((i % 4) * 8.0);
    y.push_back((i / 4) * 8.0);
    drift.push_back(0.25 * i);
    z.push_back(2.0 + 3.0 * drift.back());
  }
  sb_variogram* v = nullptr;
  REQUIRE(sb_variogram_create("exponential", 0.05, 0.5, 20.0, &v) == SB_OK);
  sb_kriging* k = nullptr;
  REQUIRE(sb_kriging_fit(x.data(), y.data(), z.data(), 12, drift.data(), 1, v, &k) ==
          SB_OK);

  const double f0 = 2.0;
  double mean = 0.0;
  REQUIRE(sb_kriging_predict(k, 12.0, 12.0, &f0, 1, &mean, nullptr) == SB_OK);
  CHECK(mean == doctest::Approx(2.0 + 3.0 * f0).epsilon(1e-6));

  // Mismatched drift length is refused.
  CHECK(sb_kriging_predict(k, 0.0, 0.0, nullptr, 0, &mean, nullptr) ==
        SB_ERROR_INVALID_ARGUMENT);

  sb_kriging_free(k);
  sb_variogram_free(v);
}

TEST_CASE("error paths set sb_last_error") {
  CHECK(sb_variogram_fit(nullptr, nullptr, nullptr, 0, "spherical", 0.0, 5,
                         nullptr) == SB_ERROR_INVALID_ARGUMENT);
  CHECK(std::strlen(sb_last_error()) > 0);

  sb_variogram* v = nullptr;
  REQUIRE(sb_variogram_create("spherical", 0.0, 1.0, 10.0, &v) == SB_OK);
  sb_kriging* k = nullptr;
  const double xs[2] = {0.0, 0.0};  // coincident points collapse; too few remain
  const double zs[2] = {1.0, 2.0};
  CHECK(sb_kriging_fit(xs, xs, zs, 2, nullptr, 0, v, &k) != SB_OK);
  CHECK(k == nullptr);
  sb_variogram_free(v);
}

TEST_CASE("pipeline handle drives a simulated workspace") {
  namespace fs = std::filesystem;
  const std::string dir = (fs::path("test_scratch") / "capi_pipeline").string();
  fs::create_directories(dir);

  sb_pipeline* p = nullptr;
  REQUIRE(sb_pipeline_new(nullptr, &p) == SB_OK);
  CHECK(sb_pipeline_set(p, "output_dir", (dir + "/out").c_str()) == SB_OK);
  CHECK(sb_pipeline_set(p, "sim_grid_n", "10") == SB_OK);
  CHECK(sb_pipeline_set(p, "sim_n_samples", "90") == SB_OK);
  CHECK(sb_pipeline_set(p, "seed", "17") == SB_OK);
  CHECK(sb_pipeline_set(p, "not_a_key", "1") == SB_ERROR_INVALID_ARGUMENT);
  CHECK(sb_pipeline_set_threads(p, 2) == SB_OK);
  CHECK(sb_pipeline_set_threads(p, 0) == SB_ERROR_INVALID_ARGUMENT);

  REQUIRE(sb_pipeline_run(p, "simulate") == SB_OK);
  CHECK(fs::exists(dir + "/out/observations.csv"));

  CHECK(sb_pipeline_set(p, "boundary", (dir + "/out/boundary.geojson").c_str()) ==
        SB_OK);
  CHECK(sb_pipeline_set(p, "observations", (dir + "/out/observations.csv").c_str()) ==
        SB_OK);
  REQUIRE(sb_pipeline_run(p, "predict") == SB_OK);
  CHECK(fs::exists(dir + "/out/predictions.csv"));
  CHECK(fs::exists(dir + "/out/manifest_predict.txt"));

  CHECK(sb_pipeline_run(p, "bogus") == SB_ERROR_INVALID_ARGUMENT);
  CHECK(std::string(sb_last_error()).find("bogus") != std::string::npos);

  // Warnings are retrievable by index.
  const size_t n = sb_pipeline_warning_count(p);
  for (size_t i = 0; i < n; ++i) CHECK(sb_pipeline_warning(p, i) != nullptr);
  CHECK(sb_pipeline_warning(p, n) == nullptr);

  sb_pipeline_free(p);
  sb_pipeline_free(nullptr);  // must be a safe no-op
}
