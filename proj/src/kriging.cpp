#include "skybright/kriging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "skybright/parallel.hpp"

namespace skybright {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kNearDuplicateKm = 1e-3;  // 1 m
}  // namespace

DriftSet drift_set_from_string(const std::string& name) {
  if (name == "mean") return DriftSet::MeanOnly;
  if (name == "landuse") return DriftSet::LandUse;
  if (name == "osm") return DriftSet::Osm;
  if (name == "combined") return DriftSet::Combined;
  throw Error("unknown covariate set '" + name +
              "' (expected mean, landuse, osm, or combined)");
}

std::string to_string(DriftSet set) {
  switch (set) {
    case DriftSet::MeanOnly: return "mean";
    case DriftSet::LandUse: return "landuse";
    case DriftSet::Osm: return "osm";
    case DriftSet::Combined: return "combined";
  }
  return "?";
}

int ModelSpec::model_id() const {
  const auto specs = all();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].covariates == covariates && specs[i].kriging == kriging) {
      return static_cast<int>(i) + 1;
    }
  }
  return 0;
}

std::array<ModelSpec, 8> ModelSpec::all() {
  return {{{DriftSet::MeanOnly, false},
           {DriftSet::MeanOnly, true},
           {DriftSet::LandUse, false},
           {DriftSet::LandUse, true},
           {DriftSet::Osm, false},
           {DriftSet::Osm, true},
           {DriftSet::Combined, false},
           {DriftSet::Combined, true}}};
}

RegressionFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (y.size() != n) throw Error("regression: X and y row counts differ");
  if (n <= p) {
    throw Error("regression needs more rows than columns (n=" + std::to_string(n) +
                ", p=" + std::to_string(p) + ")");
  }
  if (!X.allFinite() || !y.allFinite()) {
    throw Error("regression input contains non-finite values");
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    // The permutation puts the dependent columns after the first rank() ones.
    const auto perm = qr.colsPermutation().indices();
    std::string cols;
    for (Eigen::Index k = qr.rank(); k < p; ++k) {
      if (!cols.empty()) cols += ", ";
      cols += std::to_string(perm[k]);
    }
    throw Error("regression drift matrix is rank deficient; dependent column(s): " +
                cols);
  }

  RegressionFit fit;
  fit.coefficients = qr.solve(y);
  fit.residuals = y - X * fit.coefficients;
  fit.residual_variance =
      fit.residuals.squaredNorm() / static_cast<double>(n - p);
  return fit;
}

KrigingModel KrigingModel::fit(std::vector<PlanarPoint> locations,
                               Eigen::VectorXd values, Eigen::MatrixXd drift,
                               VariogramModel vgm, WarningLog* warnings) {
  const Eigen::Index n_in = static_cast<Eigen::Index>(locations.size());
  if (values.size() != n_in || drift.rows() != n_in) {
    throw Error("kriging: locations, values, and drift rows differ in length");
  }
  if (drift.cols() < 1) throw Error("kriging: drift matrix needs at least 1 column");
  if (vgm.range_km <= 0.0 || vgm.nugget < 0.0 || vgm.partial_sill < 0.0) {
    throw Error("kriging: invalid variogram parameters");
  }
  if (vgm.sill() <= 0.0) {
    throw Error("kriging: variogram with zero sill gives a singular system");
  }

  // Collapse exact duplicate locations to their mean value and mean drift.
  std::map<std::pair<double, double>, std::vector<Eigen::Index>> groups;
  for (Eigen::Index i = 0; i < n_in; ++i) {
    groups[{locations[i].x, locations[i].y}].push_back(i);
  }
  KrigingModel m;
  if (static_cast<Eigen::Index>(groups.size()) < n_in) {
    if (warnings != nullptr) {
      warnings->add("kriging: collapsed " +
                    std::to_string(n_in - static_cast<Eigen::Index>(groups.size())) +
                    " duplicate location(s) to their mean value");
    }
    const Eigen::Index n = static_cast<Eigen::Index>(groups.size());
    m.locations_.reserve(n);
    m.values_.resize(n);
    m.drift_.resize(n, drift.cols());
    Eigen::Index row = 0;
    for (const auto& [key, members] : groups) {
      double v = 0.0;
      Eigen::RowVectorXd d = Eigen::RowVectorXd::Zero(drift.cols());
      for (Eigen::Index i : members) {
        v += values[i];
        d += drift.row(i);
      }
      m.locations_.push_back({key.first, key.second});
      m.values_[row] = v / members.size();
      m.drift_.row(row) = d / members.size();
      ++row;
    }
  } else {
    m.locations_ = std::move(locations);
    m.values_ = std::move(values);
    m.drift_ = std::move(drift);
  }

  // Remaining near-duplicates would make Gamma numerically singular.
  const std::size_t n = m.locations_.size();
  std::size_t jittered = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (distance_km(m.locations_[i], m.locations_[j]) < kNearDuplicateKm) {
        m.locations_[j].x += kNearDuplicateKm;
        ++jittered;
      }
    }
  }
  if (jittered > 0 && warnings != nullptr) {
    warnings->add("kriging: jittered " + std::to_string(jittered) +
                  " near-duplicate location(s) by 1 m");
  }

  const Eigen::Index p = m.drift_.cols();
  if (static_cast<Eigen::Index>(n) < p + 1) {
    throw Error("kriging needs at least p + 1 distinct locations (n=" +
                std::to_string(n) + ", p=" + std::to_string(p) + ")");
  }

  const Eigen::Index dim = static_cast<Eigen::Index>(n) + p;
  m.system_ = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double g =
          variogram_value(vgm, distance_km(m.locations_[i], m.locations_[j]));
      m.system_(i, j) = g;
      m.system_(j, i) = g;
    }
  }
  m.system_.block(0, n, n, p) = m.drift_;
  m.system_.block(n, 0, p, n) = m.drift_.transpose();

  m.vgm_ = vgm;
  m.lu_.compute(m.system_);
  if (m.lu_.rcond() < 1e-14) {
    throw Error("kriging system is numerically singular (rcond < 1e-14); check for "
                "coincident locations or a degenerate drift matrix");
  }
  return m;
}

void KrigingModel::weights(const PlanarPoint& target,
                           const Eigen::VectorXd& target_drift,
                           Eigen::VectorXd& lambda, Eigen::VectorXd& nu) const {
  const Eigen::Index nn = static_cast<Eigen::Index>(locations_.size());
  const Eigen::Index pp = drift_.cols();
  if (target_drift.size() != pp) {
    throw Error("kriging: target drift has " + std::to_string(target_drift.size()) +
                " entries, expected " + std::to_string(pp));
  }
  Eigen::VectorXd rhs(nn + pp);
  for (Eigen::Index i = 0; i < nn; ++i) {
    rhs[i] = variogram_value(vgm_, distance_km(locations_[i], target));
  }
  rhs.tail(pp) = target_drift;
  const Eigen::VectorXd w = lu_.solve(rhs);
  if (!w.allFinite()) {
    throw Error("kriging solve produced non-finite weights");
  }
  lambda = w.head(nn);
  nu = w.tail(pp);
}

PredictionResult KrigingModel::predict(const PlanarPoint& target,
                                       const Eigen::VectorXd& target_drift) const {
  Eigen::VectorXd lambda, nu;
  weights(target, target_drift, lambda, nu);

  const Eigen::Index nn = static_cast<Eigen::Index>(locations_.size());
  double var = nu.dot(target_drift);
  for (Eigen::Index i = 0; i < nn; ++i) {
    var += lambda[i] * variogram_value(vgm_, distance_km(locations_[i], target));
  }
  const double mean = lambda.dot(values_);
  if (!std::isfinite(mean) || !std::isfinite(var)) {
    throw Error("kriging prediction is non-finite");
  }
  if (var < -1e-9) {
    throw Error("kriging variance " + std::to_string(var) +
                " is negative beyond roundoff");
  }
  return {mean, std::max(0.0, var)};
}

double KrigingModel::loocv_mse() const {
  // With B = inverse of the augmented system A and zt = (z; 0), removing
  // row/column i from A (the refit without datum i) gives, via the block
  // inverse identity, the held-out error  e_i = -(B zt)_i / B_ii.
  const Eigen::Index nn = static_cast<Eigen::Index>(locations_.size());
  const Eigen::Index pp = drift_.cols();
  if (nn < 3) throw Error("LOOCV needs at least 3 data points");

  const Eigen::MatrixXd inv = lu_.inverse();
  Eigen::VectorXd zt = Eigen::VectorXd::Zero(nn + pp);
  zt.head(nn) = values_;
  const Eigen::VectorXd u = inv * zt;

  double mse = 0.0;
  for (Eigen::Index i = 0; i < nn; ++i) {
    const double bii = inv(i, i);
    // B_ii = -1/sigma_i^2 is strictly negative when the reduced system is
    // nonsingular.
    if (!(bii < -1e-300) || !std::isfinite(u[i])) {
      throw Error("LOOCV fold " + std::to_string(i) +
                  ": reduced kriging system is singular");
    }
    const double err = -u[i] / bii;
    mse += err * err;
  }
  return mse / static_cast<double>(nn);
}

double loocv_mse_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Eigen::Index n = X.rows();
  // n = 2 under the mean model is the smallest case where every fold is
  // still solvable (leverage 1/2 < 1).
  if (n < 2) throw Error("LOOCV needs at least 2 data points");
  const RegressionFit fit = ols_fit(X, y);

  // Leverages h_ii = x_i' (X'X)^-1 x_i.
  const Eigen::MatrixXd xtx_inv =
      (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(X.cols(), X.cols()));
  double mse = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = X.row(i) * xtx_inv * X.row(i).transpose();
    if (h >= 1.0 - 1e-12) {
      throw Error("LOOCV fold " + std::to_string(i) +
                  ": datum has leverage 1, refit without it is underdetermined");
    }
    const double err = fit.residuals[i] / (1.0 - h);
    mse += err * err;
  }
  return mse / static_cast<double>(n);
}

DriftSpec build_drift_spec(DriftSet set, const std::vector<std::string>& names,
                           const std::vector<std::vector<double>>& rows,
                           double osm_radius_km, WarningLog* warnings) {
  DriftSpec spec;
  if (set == DriftSet::MeanOnly) return spec;

  auto column_index = [&](const std::string& name) {
    const auto it = std::find(names.begin(), names.end(), name);
    return it == names.end() ? -1 : static_cast<int>(it - names.begin());
  };
  auto column_stats = [&](int col, double& mean, bool& constant) {
    mean = 0.0;
    constant = true;
    double first = kNaN;
    for (const auto& row : rows) {
      const double v = row[col];
      mean += v / rows.size();
      if (std::isnan(first)) first = v;
      if (v != first) constant = false;
    }
  };

  if (set == DriftSet::LandUse || set == DriftSet::Combined) {
    std::vector<int> lc_cols;
    for (std::size_t k = 0; k < names.size(); ++k) {
      if (names[k].rfind("lc_", 0) == 0) lc_cols.push_back(static_cast<int>(k));
    }
    if (lc_cols.empty()) {
      throw Error("model needs land-cover covariates but no lc_* column exists");
    }
    // Proportions sum to ~1, so with an intercept one class must go; drop
    // the one with the largest mean, deterministically.
    int drop = lc_cols.front();
    double drop_mean = -std::numeric_limits<double>::infinity();
    for (int col : lc_cols) {
      double mean;
      bool constant;
      column_stats(col, mean, constant);
      if (mean > drop_mean) {
        drop_mean = mean;
        drop = col;
      }
    }
    for (int col : lc_cols) {
      if (col == drop) continue;
      double mean;
      bool constant;
      column_stats(col, mean, constant);
      if (constant) {
        if (warnings != nullptr) {
          warnings->add("drift: dropped constant covariate column '" + names[col] +
                        "'");
        }
        continue;
      }
      spec.columns.push_back(names[col]);
    }
  }

  if (set == DriftSet::Osm || set == DriftSet::Combined) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "osm_%gkm", osm_radius_km);
    const int col = column_index(buf);
    if (col < 0) {
      throw Error(std::string("model needs OSM covariate column '") + buf +
                  "' but it is not present");
    }
    double mean;
    bool constant;
    column_stats(col, mean, constant);
    if (constant) {
      if (warnings != nullptr) {
        warnings->add(std::string("drift: OSM column '") + buf +
                      "' is constant and was dropped");
      }
    } else {
      spec.columns.push_back(buf);
    }
  }
  return spec;
}

Eigen::MatrixXd drift_matrix(const DriftSpec& spec,
                             const std::vector<std::string>& names,
                             const std::vector<std::vector<double>>& rows) {
  std::vector<int> cols;
  cols.reserve(spec.columns.size());
  for (const auto& wanted : spec.columns) {
    const auto it = std::find(names.begin(), names.end(), wanted);
    if (it == names.end()) {
      throw Error("drift column '" + wanted + "' is missing from the table");
    }
    cols.push_back(static_cast<int>(it - names.begin()));
  }
  Eigen::MatrixXd X(rows.size(), cols.size() + 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    X(i, 0) = 1.0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      X(i, k + 1) = rows[i][cols[k]];
    }
  }
  return X;
}

void predict_grid(Grid& grid, const ModelSpec& spec, const KrigingModel* kriged,
                  const RegressionFit* regression, const Eigen::MatrixXd& grid_drift,
                  WarningLog& warnings, int threads) {
  const std::size_t n = grid.cells.size();
  if (static_cast<std::size_t>(grid_drift.rows()) != n) {
    throw Error("grid drift rows do not match the grid size");
  }
  if (spec.kriging && kriged == nullptr) {
    throw Error("kriging spec without a fitted kriging model");
  }
  if (!spec.kriging && regression == nullptr) {
    throw Error("regression spec without a fitted regression");
  }

  grid.prediction.assign(n, kNaN);
  grid.prediction_variance.assign(n, kNaN);
  std::vector<char> missing(n, 0);
  std::vector<std::string> cell_error(n);

  parallel_for(n, threads, [&](std::size_t i) {
    const Eigen::VectorXd f0 = grid_drift.row(static_cast<Eigen::Index>(i));
    if (!f0.allFinite()) {
      missing[i] = 1;
      return;
    }
    try {
      if (spec.kriging) {
        const PredictionResult r = kriged->predict(grid.cells[i].center, f0);
        grid.prediction[i] = r.mean;
        grid.prediction_variance[i] = r.variance;
      } else {
        grid.prediction[i] = f0.dot(regression->coefficients);
        grid.prediction_variance[i] = regression->residual_variance;
      }
    } catch (const Error& e) {
      cell_error[i] = e.what();
    }
  });

  for (std::size_t i = 0; i < n; ++i) {
    if (!cell_error[i].empty()) {
      throw Error("predict: cell " + std::to_string(grid.cells[i].index) + ": " +
                  cell_error[i]);
    }
  }
  const long n_missing = std::count(missing.begin(), missing.end(), 1);
  if (n_missing > 0) {
    warnings.add("predict: " + std::to_string(n_missing) +
                 " cell(s) lack covariates and stay unpredicted");
  }
}

}  // namespace skybright
