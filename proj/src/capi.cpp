#include "skybright/skybright.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "skybright/config.hpp"
#include "skybright/kriging.hpp"
#include "skybright/pipeline.hpp"
#include "skybright/types.hpp"
#include "skybright/variogram.hpp"

namespace {

thread_local std::string g_last_error;

sb_status fail(sb_status code, const char* what) {
  g_last_error = what;
  return code;
}

/* Exceptions never cross the C boundary. */
template <typename Fn>
sb_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const skybright::Error& e) {
    return fail(SB_ERROR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(SB_ERROR_INTERNAL, e.what());
  } catch (...) {
    return fail(SB_ERROR_INTERNAL, "unknown error");
  }
}

sb_status classify(const skybright::Error& e) {
  const std::string what = e.what();
  if (what.find("cannot open") != std::string::npos ||
      what.find("malformed") != std::string::npos ||
      what.find("write failed") != std::string::npos) {
    return SB_ERROR_IO;
  }
  if (what.find("singular") != std::string::npos ||
      what.find("non-finite") != std::string::npos ||
      what.find("fit failed") != std::string::npos) {
    return SB_ERROR_NUMERIC;
  }
  return SB_ERROR_INVALID_ARGUMENT;
}

}  // namespace

struct sb_variogram {
  skybright::VariogramModel model;
};

struct sb_kriging {
  skybright::KrigingModel model;
  explicit sb_kriging(skybright::KrigingModel m) : model(std::move(m)) {}
};

struct sb_pipeline {
  skybright::PipelineConfig config;
  skybright::WarningLog warnings;
  int threads{1};
};

extern "C" {

const char* sb_last_error(void) { return g_last_error.c_str(); }

const char* sb_version(void) { return skybright::kVersion; }

const char* sb_config_reference(void) {
  static const std::string text = skybright::PipelineConfig::reference();
  return text.c_str();
}

sb_status sb_variogram_fit(const double* x_km, const double* y_km, const double* z,
                           size_t n, const char* family, double cutoff_km,
                           int n_bins, sb_variogram** out) {
  if (x_km == nullptr || y_km == nullptr || z == nullptr || family == nullptr ||
      out == nullptr) {
    return fail(SB_ERROR_INVALID_ARGUMENT, "null pointer argument");
  }
  *out = nullptr;
  return guarded([&]() -> sb_status {
    try {
      std::vector<skybright::PlanarPoint> pts(n);
      std::vector<double> vals(z, z + n);
      for (size_t i = 0; i < n; ++i) pts[i] = {x_km[i], y_km[i]};
      double cutoff = cutoff_km;
      if (cutoff <= 0.0) {
        double dmax = 0.0;
        for (size_t i = 0; i < n; ++i) {
          for (size_t j = i + 1; j < n; ++j) {
            dmax = std::max(dmax, skybright::distance_km(pts[i], pts[j]));
          }
        }
        cutoff = dmax / 3.0;
      }
      const auto emp = skybright::empirical_variogram(pts, vals, cutoff, n_bins);
      const auto model = skybright::fit_variogram(
          emp, skybright::variogram_family_from_string(family));
      *out = new sb_variogram{model};
      return SB_OK;
    } catch (const skybright::Error& e) {
      return fail(classify(e), e.what());
    }
  });
}

sb_status sb_variogram_create(const char* family, double nugget,
                              double partial_sill, double range_km,
                              sb_variogram** out) {
  if (family == nullptr || out == nullptr) {
    return fail(SB_ERROR_INVALID_ARGUMENT, "null pointer argument");
  }
  *out = nullptr;
  return guarded([&]() -> sb_status {
    if (nugget < 0.0 || partial_sill < 0.0 || range_km <= 0.0) {
      return fail(SB_ERROR_INVALID_ARGUMENT,
                  "variogram parameters must be nonnegative with a positive range");
    }
    *out = new sb_variogram{{skybright::variogram_family_from_string(family), nugget,
                             partial_sill, range_km}};
    return SB_OK;
  });
}

sb_status sb_variogram_params(const sb_variogram* v, double* nugget,
                              double* partial_sill, double* range_km) {
  if (v == nullptr) return fail(SB_ERROR_INVALID_ARGUMENT, "null variogram handle");
  if (nugget != nullptr) *nugget = v->model.nugget;
  if (partial_sill != nullptr) *partial_sill = v->model.partial_sill;
  if (range_km != nullptr) *range_km = v->model.range_km;
  return SB_OK;
}

double sb_variogram_gamma(const sb_variogram* v, double h_km) {
  if (v == nullptr || h_km < 0.0 || !std::isfinite(h_km)) return -1.0;
  return skybright::variogram_value(v->model, h_km);
}

void sb_variogram_free(sb_variogram* v) { delete v; }

sb_status sb_kriging_fit(const double* x_km, const double* y_km, const double* z,
                         size_t n, const double* drift, size_t p,
                         const sb_variogram* variogram, sb_kriging** out) {
  if (x_km == nullptr || y_km == nullptr || z == nullptr || variogram == nullptr ||
      out == nullptr || (p > 0 && drift == nullptr)) {
    return fail(SB_ERROR_INVALID_ARGUMENT, "null pointer argument");
  }
  *out = nullptr;
  return guarded([&]() -> sb_status {
    try {
      std::vector<skybright::PlanarPoint> pts(n);
      for (size_t i = 0; i < n; ++i) pts[i] = {x_km[i], y_km[i]};
      Eigen::VectorXd values = Eigen::Map<const Eigen::VectorXd>(z, n);
      Eigen::MatrixXd x(n, p + 1);
      x.col(0).setOnes();
      for (size_t i = 0; i < n; ++i) {
        for (size_t k = 0; k < p; ++k) x(i, k + 1) = drift[i * p + k];
      }
      *out = new sb_kriging(skybright::KrigingModel::fit(
          std::move(pts), std::move(values), std::move(x), variogram->model));
      return SB_OK;
    } catch (const skybright::Error& e) {
      return fail(classify(e), e.what());
    }
  });
}

sb_status sb_kriging_predict(const sb_kriging* k, double x_km, double y_km,
                             const double* target_drift, size_t p, double* mean,
                             double* variance) {
  if (k == nullptr || (p > 0 && target_drift == nullptr)) {
    return fail(SB_ERROR_INVALID_ARGUMENT, "null pointer argument");
  }
  return guarded([&]() -> sb_status {
    try {
      if (static_cast<size_t>(k->model.p()) != p + 1) {
        return fail(SB_ERROR_INVALID_ARGUMENT,
                    "target drift length does not match the fitted model");
      }
      Eigen::VectorXd f0(p + 1);
      f0[0] = 1.0;
      for (size_t i = 0; i < p; ++i) f0[i + 1] = target_drift[i];
      const auto r = k->model.predict({x_km, y_km}, f0);
      if (mean != nullptr) *mean = r.mean;
      if (variance != nullptr) *variance = r.variance;
      return SB_OK;
    } catch (const skybright::Error& e) {
      return fail(classify(e), e.what());
    }
  });
}

sb_status sb_kriging_loocv_mse(const sb_kriging* k, double* mse) {
  if (k == nullptr || mse == nullptr) {
    return fail(SB_ERROR_INVALID_ARGUMENT, "null pointer argument");
  }
  return guarded([&]() -> sb_status {
    try {
      *mse = k->model.loocv_mse();
      return SB_OK;
    } catch (const skybright::Error& e) {
      return fail(classify(e), e.what());
    }
  });
}

void sb_kriging_free(sb_kriging* k) { delete k; }

sb_status sb_pipeline_new(const char* config_path, sb_pipeline** out) {
  if (out == nullptr) return fail(SB_ERROR_INVALID_ARGUMENT, "null pointer argument");
  *out = nullptr;
  return guarded([&]() -> sb_status {
    try {
      auto p = new sb_pipeline();
      if (config_path != nullptr) {
        try {
          p->config.load(config_path);
        } catch (...) {
          delete p;
          throw;
        }
      }
      *out = p;
      return SB_OK;
    } catch (const skybright::Error& e) {
      return fail(classify(e), e.what());
    }
  });
}

sb_status sb_pipeline_set(sb_pipeline* p, const char* key, const char* value) {
  if (p == nullptr || key == nullptr || value == nullptr) {
    return fail(SB_ERROR_INVALID_ARGUMENT, "null pointer argument");
  }
  return guarded([&]() -> sb_status {
    try {
      p->config.set(key, value);
      return SB_OK;
    } catch (const skybright::Error& e) {
      return fail(classify(e), e.what());
    }
  });
}

sb_status sb_pipeline_set_threads(sb_pipeline* p, int threads) {
  if (p == nullptr) return fail(SB_ERROR_INVALID_ARGUMENT, "null pipeline handle");
  if (threads < 1) return fail(SB_ERROR_INVALID_ARGUMENT, "threads must be >= 1");
  p->threads = threads;
  return SB_OK;
}

sb_status sb_pipeline_run(sb_pipeline* p, const char* subcommand) {
  if (p == nullptr || subcommand == nullptr) {
    return fail(SB_ERROR_INVALID_ARGUMENT, "null pointer argument");
  }
  return guarded([&]() -> sb_status {
    try {
      skybright::run_pipeline(subcommand, p->config, p->warnings, p->threads);
      return SB_OK;
    } catch (const skybright::Error& e) {
      return fail(classify(e), e.what());
    }
  });
}

size_t sb_pipeline_warning_count(const sb_pipeline* p) {
  return p == nullptr ? 0 : p->warnings.count();
}

const char* sb_pipeline_warning(const sb_pipeline* p, size_t index) {
  if (p == nullptr || index >= p->warnings.count()) return nullptr;
  return p->warnings.messages()[index].c_str();
}

void sb_pipeline_free(sb_pipeline* p) { delete p; }

}  // extern "C"
