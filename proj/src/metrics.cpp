#include "skybright/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "skybright/io.hpp"

namespace skybright {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> midranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * (i + j) + 1.0;  // average of 1-based positions
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b,
               const char* what) {
  const std::size_t n = a.size();
  const auto [amin, amax] = std::minmax_element(a.begin(), a.end());
  const auto [bmin, bmax] = std::minmax_element(b.begin(), b.end());
  if (*amin == *amax || *bmin == *bmax) {
    throw Error(std::string(what) + ": zero variance, correlation undefined");
  }
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double cab = 0.0, cbb = 0.0, caa = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    caa += da * da;
    cbb += db * db;
    cab += da * db;
  }
  if (caa <= 0.0 || cbb <= 0.0) {
    throw Error(std::string(what) + ": zero variance, correlation undefined");
  }
  return cab / std::sqrt(caa * cbb);
}

void check_pair(const std::vector<double>& a, const std::vector<double>& b,
                std::size_t min_n, const char* what) {
  if (a.size() != b.size()) {
    throw Error(std::string(what) + ": input lengths differ");
  }
  if (a.size() < min_n) {
    throw Error(std::string(what) + ": needs at least " + std::to_string(min_n) +
                " pairs");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) {
      throw Error(std::string(what) + ": non-finite value at index " +
                  std::to_string(i));
    }
  }
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  check_pair(a, b, 3, "spearman");
  return pearson(midranks(a), midranks(b), "spearman");
}

double r_squared(const std::vector<double>& pred,
                 const std::vector<double>& skyglow) {
  check_pair(pred, skyglow, 3, "r_squared");
  std::vector<double> logged(skyglow.size());
  for (std::size_t i = 0; i < skyglow.size(); ++i) {
    if (skyglow[i] <= 0.0) {
      throw Error("r_squared: nonpositive skyglow at index " + std::to_string(i));
    }
    logged[i] = std::log(skyglow[i]);
  }
  const double r = pearson(pred, logged, "r_squared");
  return r * r;
}

double mse(const std::vector<double>& pred, const std::vector<double>& obs) {
  check_pair(pred, obs, 1, "mse");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - obs[i];
    acc += d * d;
  }
  return acc / pred.size();
}

InferenceResult observed_mean(const std::vector<Observation>& obs) {
  if (obs.size() < 2) throw Error("observed mean needs at least 2 observations");
  InferenceResult r;
  r.n = static_cast<long>(obs.size());
  for (const auto& o : obs) r.mean += static_cast<double>(o.brightness) / obs.size();
  double ss = 0.0;
  for (const auto& o : obs) {
    const double d = o.brightness - r.mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / (obs.size() - 1));
  r.se_between = sd / std::sqrt(static_cast<double>(obs.size()));
  r.se_within = 0.0;
  r.se_total = r.se_between;
  return r;
}

InferenceResult state_mean(const std::vector<double>& cell_values,
                           const std::vector<double>& cell_variances) {
  const std::size_t n = cell_values.size();
  if (n < 2) throw Error("state mean needs at least 2 cells");
  if (cell_variances.size() != n) {
    throw Error("state mean: values and variances differ in length");
  }
  std::string missing;
  long n_missing = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(cell_values[i]) || std::isnan(cell_variances[i])) {
      ++n_missing;
      if (n_missing <= 8) {
        missing += (missing.empty() ? "" : ", ") + std::to_string(i);
      }
    }
  }
  if (n_missing > 0) {
    throw Error("state mean: " + std::to_string(n_missing) +
                " unpredicted cell(s): " + missing + (n_missing > 8 ? ", ..." : ""));
  }

  InferenceResult r;
  r.n = static_cast<long>(n);
  for (double v : cell_values) r.mean += v / n;
  double ss = 0.0, var_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = cell_values[i] - r.mean;
    ss += d * d;
    var_sum += cell_variances[i];
  }
  r.se_between = std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n));
  r.se_within = std::sqrt(var_sum) / static_cast<double>(n);
  r.se_total = std::hypot(r.se_between, r.se_within);
  return r;
}

FittedModel fit_model(const ModelSpec& spec, const ModelData& data,
                      WarningLog& warnings) {
  FittedModel model;
  model.spec = spec;
  model.drift = build_drift_spec(spec.covariates, data.covariate_names,
                                 data.covariates, data.osm_radius_km, &warnings);
  const Eigen::MatrixXd X =
      drift_matrix(model.drift, data.covariate_names, data.covariates);
  if (!X.allFinite()) {
    throw Error("model " + std::to_string(spec.model_id()) +
                ": data rows have missing covariates");
  }
  model.regression = ols_fit(X, data.values);

  if (spec.kriging) {
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
    const std::vector<double> resid(model.regression.residuals.data(),
                                    model.regression.residuals.data() +
                                        model.regression.residuals.size());
    const EmpiricalVariogram emp =
        empirical_variogram(data.locations, resid, cutoff, data.variogram_bins);
    model.variogram = fit_variogram(emp, data.family, &warnings);
    if (model.variogram.sill() <= 0.0) {
      // A flat zero variogram cannot drive a kriging system; keep the model
      // usable by falling back to a small nugget at the residual scale.
      const double fallback =
          std::max(1e-12, model.regression.residual_variance);
      warnings.add("model " + std::to_string(spec.model_id()) +
                   ": residual variogram has zero sill, using nugget " +
                   std::to_string(fallback));
      model.variogram.nugget = fallback;
    }
    model.kriged = std::make_shared<KrigingModel>(
        KrigingModel::fit(data.locations, data.values, X, model.variogram,
                          &warnings));
  }
  return model;
}

void predict_with_model(Grid& grid, const FittedModel& model, WarningLog& warnings,
                        int threads) {
  const Eigen::MatrixXd grid_x =
      drift_matrix(model.drift, grid.covariate_names, grid.covariates);
  predict_grid(grid, model.spec, model.kriged.get(), &model.regression, grid_x,
               warnings, threads);
}

std::vector<ValidationReport> compare_models(const std::vector<ModelSpec>& specs,
                                             const ModelData& data, Grid& grid,
                                             const std::vector<double>& skyglow,
                                             const std::vector<CellAggregate>& observed,
                                             WarningLog& warnings, int threads) {
  if (skyglow.size() != grid.cells.size()) {
    throw Error("compare_models: skyglow vector does not match the grid");
  }
  const long n_dark = std::count_if(skyglow.begin(), skyglow.end(),
                                    [](double v) { return v <= 0.0; });
  if (n_dark > 0) {
    warnings.add("validate: " + std::to_string(n_dark) +
                 " cell(s) with zero skyglow are excluded from the external "
                 "comparison");
  }
  std::vector<ValidationReport> reports;
  for (const ModelSpec& spec : specs) {
    ValidationReport report;
    report.model = spec;
    report.loocv_mse = kNaN;
    report.spearman_rho = kNaN;
    report.r_squared = kNaN;
    try {
      const FittedModel model = fit_model(spec, data, warnings);

      if (spec.kriging) {
        report.loocv_mse = model.kriged->loocv_mse();
      } else {
        const Eigen::MatrixXd X =
            drift_matrix(model.drift, data.covariate_names, data.covariates);
        report.loocv_mse = loocv_mse_ols(X, data.values);
        if (spec.covariates == DriftSet::MeanOnly) {
          report.note = "mean-only LOOCV reduces to n/(n-1) times the variance";
        }
      }

      predict_with_model(grid, model, warnings, threads);

      // The mean-only map is flat; its usable prediction is the inference
      // map, where observed cells carry their observed means.
      if (spec.covariates == DriftSet::MeanOnly && !spec.kriging) {
        for (const auto& agg : observed) {
          grid.prediction[static_cast<std::size_t>(agg.cell)] = agg.mean;
        }
        report.note = report.note.empty()
                          ? "observed cells patched with cell means"
                          : report.note + "; observed cells patched with cell means";
      }

      std::vector<double> pred_valid, glow_valid, darkness;
      for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        if (std::isnan(grid.prediction[i]) || std::isnan(skyglow[i]) ||
            skyglow[i] <= 0.0) {
          continue;
        }
        pred_valid.push_back(grid.prediction[i]);
        glow_valid.push_back(skyglow[i]);
        // Predictions live on the 0-7 darkness scale while skyglow grows
        // with brightness; rank agreement is therefore measured against the
        // negated skyglow so that a faithful model scores positive.
        darkness.push_back(-skyglow[i]);
      }
      report.spearman_rho = spearman(pred_valid, darkness);
      report.r_squared = r_squared(pred_valid, glow_valid);
    } catch (const Error& e) {
      warnings.add("model " + std::to_string(spec.model_id()) + " failed: " +
                   e.what());
      report.note = e.what();
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

std::string reports_to_csv(const std::vector<ValidationReport>& reports) {
  std::ostringstream out;
  out << "model_id,covariates,kriging,loocv_mse,spearman_rho,r_squared\n";
  for (const auto& r : reports) {
    out << r.model.model_id() << ',' << to_string(r.model.covariates) << ','
        << (r.model.kriging ? "yes" : "no") << ',' << format_number(r.loocv_mse)
        << ',' << format_number(r.spearman_rho) << ',' << format_number(r.r_squared)
        << "\n";
  }
  return out.str();
}

std::string reports_to_table(const std::vector<ValidationReport>& reports) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%5s  %-9s  %-7s  %10s  %10s  %8s\n", "model",
                "covars", "kriging", "loocv_mse", "spearman", "r2");
  out << line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof(line), "%5d  %-9s  %-7s  %10.4f  %10.4f  %8.4f\n",
                  r.model.model_id(), to_string(r.model.covariates).c_str(),
                  r.model.kriging ? "yes" : "no", r.loocv_mse, r.spearman_rho,
                  r.r_squared);
    out << line;
  }
  return out.str();
}

}  // namespace skybright
