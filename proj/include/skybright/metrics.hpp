#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "skybright/enrich.hpp"
#include "skybright/geo.hpp"
#include "skybright/kriging.hpp"
#include "skybright/types.hpp"

namespace skybright {

/// Spearman rank correlation: Pearson correlation of mid-ranks, ties get
/// average ranks. Throws when either input has zero rank variance.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

/// Squared Pearson correlation of predictions with the natural log of the
/// skyglow values (which must be positive).
double r_squared(const std::vector<double>& pred,
                 const std::vector<double>& skyglow);

/// Mean squared difference.
double mse(const std::vector<double>& pred, const std::vector<double>& obs);

/// Area-mean inference with its standard-error decomposition.
/// se_total combines the parts in quadrature; the linear sum is kept as a
/// secondary diagnostic.
struct InferenceResult {
  double mean{0.0};
  double se_between{0.0};
  double se_within{0.0};
  double se_total{0.0};
  long n{0};

  double se_linear_sum() const { return se_between + se_within; }
};

/// Naive mean of the raw observations; se = sd/sqrt(n).
InferenceResult observed_mean(const std::vector<Observation>& obs);

/// Bias-corrected mean over every grid cell. Expects a fully populated
/// grid: observed cells carry their observed mean with variance 0,
/// unobserved cells a model prediction with its kriging variance.
InferenceResult state_mean(const std::vector<double>& cell_values,
                           const std::vector<double>& cell_variances);

/// One row of the model-comparison table.
struct ValidationReport {
  ModelSpec model;
  double loocv_mse{0.0};
  double spearman_rho{0.0};
  double r_squared{0.0};
  std::string note;
};

/// Everything the eight models share: deduplicated cell-level data with its
/// covariates and the variogram estimation settings.
struct ModelData {
  std::vector<PlanarPoint> locations;       // populated cell centers
  Eigen::VectorXd values;                   // observed cell means
  std::vector<std::string> covariate_names;
  std::vector<std::vector<double>> covariates;  // per datum
  double osm_radius_km{10.0};
  VariogramFamily family{VariogramFamily::Spherical};
  double variogram_cutoff_km{0.0};  // 0 = one third of the max pair distance
  int variogram_bins{15};
};

/// One fitted model: regression, optional kriging state, and its grid
/// predictions.
struct FittedModel {
  ModelSpec spec;
  DriftSpec drift;
  RegressionFit regression;
  VariogramModel variogram;        // fitted on OLS residuals
  std::shared_ptr<KrigingModel> kriged;  // null for non-kriging specs
};

/// Fit one ModelSpec on the shared data (variogram estimated once on the
/// full-data OLS residuals, then held fixed).
FittedModel fit_model(const ModelSpec& spec, const ModelData& data,
                      WarningLog& warnings);

/// Fill grid predictions for a fitted model.
void predict_with_model(Grid& grid, const FittedModel& model, WarningLog& warnings,
                        int threads = 1);

/// Run the full comparison: LOOCV MSE plus external Spearman/R-squared
/// against per-cell skyglow, one report per spec in the given order. A
/// model that fails is reported with NaN metrics and a note, and the
/// comparison continues.
std::vector<ValidationReport> compare_models(const std::vector<ModelSpec>& specs,
                                             const ModelData& data, Grid& grid,
                                             const std::vector<double>& skyglow,
                                             const std::vector<CellAggregate>& observed,
                                             WarningLog& warnings, int threads = 1);

/// Serialize reports as CSV (model_id,covariates,kriging,loocv_mse,
/// spearman_rho,r_squared) and as an aligned text table.
std::string reports_to_csv(const std::vector<ValidationReport>& reports);
std::string reports_to_table(const std::vector<ValidationReport>& reports);

}  // namespace skybright
