#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "skybright/geo.hpp"
#include "skybright/kriging.hpp"
#include "skybright/types.hpp"
#include "skybright/variogram.hpp"

namespace skybright {

/// Deterministic random source for the synthetic experiments: mt19937_64
/// engines with explicit uniform/normal draws so every stream is
/// reproducible bit-for-bit for a given seed.
///
/// Stream-splitting rule: the field stream uses the seed itself; the
/// sampling stream uses seed XOR 0x9e3779b97f4a7c15. Draw order is fixed
/// (field noise by cell index; then per sample: cell pick, x jitter,
/// y jitter, value noise).
class SynthRng {
public:
  explicit SynthRng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [0, 1) from the top 53 bits of one engine draw.
  double uniform();
  /// Standard normal via Box-Muller (std::normal_distribution is not
  /// pinned by the standard, so it cannot be used here).
  double normal();

  static constexpr std::uint64_t kSamplingStreamSalt = 0x9e3779b97f4a7c15ULL;

private:
  std::mt19937_64 engine_;
  bool have_spare_{false};
  double spare_{0.0};
};

struct SimConfig {
  std::uint64_t seed{1};
  Eigen::VectorXd true_coefficients;        // matches the drift columns
  VariogramModel variogram;                 // spatial structure of the noise
  Eigen::VectorXd sampling_intensity;       // per cell, nonnegative
  int n_samples{100};
  double noise_sd{0.0};                     // iid observation noise
};

/// Gaussian-process field over the grid cells: drift * beta plus correlated
/// noise with covariance C(h) = sill - gamma(h), drawn through a dense
/// symmetric square root. Deterministic given the seed; grids are limited
/// to 2500 cells.
Eigen::VectorXd simulate_gp_field(const Grid& grid, const Eigen::MatrixXd& drift,
                                  const SimConfig& cfg);

struct SamplePoint {
  PlanarPoint location;
  double value;
  std::int32_t cell;
};

/// Draws n_samples cells with probability proportional to the intensity
/// weights, jitters each location uniformly within its cell, and adds
/// optional iid noise to the field value.
std::vector<SamplePoint> biased_sample(const Eigen::VectorXd& field, const Grid& grid,
                                       const SimConfig& cfg);

/// Plain textbook universal-kriging solve: build the full augmented system,
/// factor it with a general dense solver, and read off mean and variance.
/// Independent of KrigingModel; used to cross-check it.
PredictionResult dense_kriging_oracle(const std::vector<PlanarPoint>& locations,
                                      const std::vector<double>& values,
                                      const Eigen::MatrixXd& drift,
                                      const VariogramModel& vgm,
                                      const PlanarPoint& target,
                                      const Eigen::VectorXd& target_drift);

}  // namespace skybright
