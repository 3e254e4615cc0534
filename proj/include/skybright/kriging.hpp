#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "skybright/geo.hpp"
#include "skybright/types.hpp"
#include "skybright/variogram.hpp"

namespace skybright {

enum class DriftSet { MeanOnly, LandUse, Osm, Combined };

DriftSet drift_set_from_string(const std::string& name);
std::string to_string(DriftSet set);

/// One row of the eight-model comparison: a covariate set with or without
/// kriging of the residual spatial structure.
struct ModelSpec {
  DriftSet covariates{DriftSet::MeanOnly};
  bool kriging{false};

  /// 1-based id in the canonical comparison order.
  int model_id() const;
  /// All eight specs in comparison order.
  static std::array<ModelSpec, 8> all();
};

struct RegressionFit {
  Eigen::VectorXd coefficients;   // one per drift column
  Eigen::VectorXd residuals;      // y - X beta
  double residual_variance{0.0};  // SSR / (n - p)
};

/// Least squares via column-pivoted QR. Throws when X is rank deficient,
/// naming the dependent columns.
RegressionFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

struct PredictionResult {
  double mean{0.0};
  double variance{0.0};
};

/// Fitted universal-kriging state: deduplicated data, drift matrix, and the
/// factorized augmented system [Gamma F; F' 0]. Immutable after fit;
/// concurrent predict() calls are safe.
class KrigingModel {
public:
  /// Builds and factorizes the kriging system. Exact duplicate locations
  /// are collapsed to their mean value; remaining near-duplicates (< 1 m)
  /// are jittered by 1 m with a warning.
  static KrigingModel fit(std::vector<PlanarPoint> locations, Eigen::VectorXd values,
                          Eigen::MatrixXd drift, VariogramModel vgm,
                          WarningLog* warnings = nullptr);

  PredictionResult predict(const PlanarPoint& target,
                           const Eigen::VectorXd& target_drift) const;

  /// Kriging weights lambda and Lagrange multipliers nu for a target;
  /// exposed for diagnostics and the unbiasedness checks.
  void weights(const PlanarPoint& target, const Eigen::VectorXd& target_drift,
               Eigen::VectorXd& lambda, Eigen::VectorXd& nu) const;

  /// Exact leave-one-out cross-validated MSE with the variogram held
  /// fixed: each datum is predicted from the remaining n-1 via the
  /// block-inverse identity, which reproduces a full refit per fold.
  double loocv_mse() const;

  int n() const { return static_cast<int>(locations_.size()); }
  int p() const { return static_cast<int>(drift_.cols()); }
  const std::vector<PlanarPoint>& locations() const { return locations_; }
  const Eigen::VectorXd& values() const { return values_; }
  const Eigen::MatrixXd& drift() const { return drift_; }
  const VariogramModel& variogram() const { return vgm_; }
  /// The assembled augmented system (for verification against an
  /// independently built matrix).
  const Eigen::MatrixXd& system_matrix() const { return system_; }

private:
  KrigingModel() = default;

  std::vector<PlanarPoint> locations_;
  Eigen::VectorXd values_;
  Eigen::MatrixXd drift_;
  VariogramModel vgm_;
  Eigen::MatrixXd system_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

/// Exact leave-one-out MSE of an OLS fit via the hat-matrix identity
/// e_i = r_i / (1 - h_ii); equals refitting without datum i.
double loocv_mse_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// Drift construction for a covariate table. Selects columns for the
/// ModelSpec (lc_* for land use, the osm_<radius>km column for OSM), drops
/// constant columns, and removes the land-cover class with the largest mean
/// proportion, which is otherwise collinear with the intercept.
struct DriftSpec {
  std::vector<std::string> columns;  // selected covariate columns, in order
};

DriftSpec build_drift_spec(DriftSet set, const std::vector<std::string>& names,
                           const std::vector<std::vector<double>>& rows,
                           double osm_radius_km, WarningLog* warnings = nullptr);

/// Drift matrix [1, selected columns] for arbitrary rows laid out like
/// `names`. Rows with a missing (NaN) selected covariate yield NaN entries.
Eigen::MatrixXd drift_matrix(const DriftSpec& spec,
                             const std::vector<std::string>& names,
                             const std::vector<std::vector<double>>& rows);

/// Prediction for every grid cell. Kriging specs evaluate the fitted model
/// per cell; non-kriging specs return X beta with the OLS residual variance.
/// Cells with missing covariates stay unpredicted and are counted in a
/// warning. Thread count never changes the result.
void predict_grid(Grid& grid, const ModelSpec& spec, const KrigingModel* kriged,
                  const RegressionFit* regression, const Eigen::MatrixXd& grid_drift,
                  WarningLog& warnings, int threads = 1);

}  // namespace skybright
