#include "skybright/synth.hpp"

#include <cmath>

namespace skybright {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double SynthRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SynthRng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * kPi * u2);
  have_spare_ = true;
  return r * std::cos(2.0 * kPi * u2);
}

Eigen::VectorXd simulate_gp_field(const Grid& grid, const Eigen::MatrixXd& drift,
                                  const SimConfig& cfg) {
  const Eigen::Index n = static_cast<Eigen::Index>(grid.cells.size());
  if (n == 0) throw Error("simulate: empty grid");
  if (n > 2500) {
    throw Error("simulate: dense covariance path is limited to 2500 cells, got " +
                std::to_string(n));
  }
  if (drift.rows() != n || drift.cols() != cfg.true_coefficients.size()) {
    throw Error("simulate: drift shape does not match grid and coefficients");
  }

  Eigen::VectorXd field = drift * cfg.true_coefficients;

  const double sill = cfg.variogram.sill();
  if (sill > 0.0) {
    // C(h) = sill - gamma(h); the nugget appears only on the diagonal.
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      cov(i, i) = sill;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double g = variogram_value(
            cfg.variogram, distance_km(grid.cells[i].center, grid.cells[j].center));
        cov(i, j) = sill - g;
        cov(j, i) = cov(i, j);
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) {
      throw Error("simulate: covariance eigendecomposition failed");
    }
    Eigen::VectorXd lam = eig.eigenvalues();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (lam[i] < -1e-8 * sill * n) {
        throw Error("simulate: covariance is not positive semidefinite (eigenvalue " +
                    std::to_string(lam[i]) + ")");
      }
      lam[i] = std::sqrt(std::max(0.0, lam[i]));
    }
    SynthRng rng(cfg.seed);
    Eigen::VectorXd eps(n);
    for (Eigen::Index i = 0; i < n; ++i) eps[i] = rng.normal();
    field += eig.eigenvectors() * lam.asDiagonal() * eps;
  }
  return field;
}

std::vector<SamplePoint> biased_sample(const Eigen::VectorXd& field, const Grid& grid,
                                       const SimConfig& cfg) {
  const Eigen::Index n = static_cast<Eigen::Index>(grid.cells.size());
  if (field.size() != n) throw Error("sample: field does not match the grid");
  if (cfg.sampling_intensity.size() != n) {
    throw Error("sample: intensity does not match the grid");
  }
  if (cfg.n_samples < 1) throw Error("sample: need at least 1 sample");

  Eigen::VectorXd cdf(n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = cfg.sampling_intensity[i];
    if (w < 0.0 || !std::isfinite(w)) {
      throw Error("sample: intensity weights must be finite and nonnegative");
    }
    total += w;
    cdf[i] = total;
  }
  if (total <= 0.0) throw Error("sample: intensity weights are all zero");

  SynthRng rng(cfg.seed ^ SynthRng::kSamplingStreamSalt);
  std::vector<SamplePoint> out;
  out.reserve(cfg.n_samples);
  const double h = 0.5 * grid.cell_size_km;
  for (int s = 0; s < cfg.n_samples; ++s) {
    const double r = rng.uniform() * total;
    const Eigen::Index cell =
        std::lower_bound(cdf.data(), cdf.data() + n, r) - cdf.data();
    const Eigen::Index c = std::min(cell, n - 1);
    const PlanarPoint center = grid.cells[c].center;
    const double jx = (rng.uniform() - 0.5) * 2.0 * h;
    const double jy = (rng.uniform() - 0.5) * 2.0 * h;
    double value = field[c];
    if (cfg.noise_sd > 0.0) value += cfg.noise_sd * rng.normal();
    out.push_back({{center.x + jx, center.y + jy}, value,
                   grid.cells[c].index});
  }
  return out;
}

PredictionResult dense_kriging_oracle(const std::vector<PlanarPoint>& locations,
                                      const std::vector<double>& values,
                                      const Eigen::MatrixXd& drift,
                                      const VariogramModel& vgm,
                                      const PlanarPoint& target,
                                      const Eigen::VectorXd& target_drift) {
  const Eigen::Index n = static_cast<Eigen::Index>(locations.size());
  const Eigen::Index p = drift.cols();
  if (n > 50) throw Error("oracle: limited to 50 points");
  if (static_cast<Eigen::Index>(values.size()) != n || drift.rows() != n ||
      target_drift.size() != p) {
    throw Error("oracle: inconsistent input sizes");
  }

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + p, n + p);
  Eigen::VectorXd b(n + p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      a(i, j) = i == j ? 0.0
                       : variogram_value(vgm, distance_km(locations[i], locations[j]));
    }
    for (Eigen::Index k = 0; k < p; ++k) {
      a(i, n + k) = drift(i, k);
      a(n + k, i) = drift(i, k);
    }
    b[i] = variogram_value(vgm, distance_km(locations[i], target));
  }
  for (Eigen::Index k = 0; k < p; ++k) b[n + k] = target_drift[k];

  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) throw Error("oracle: singular kriging system");
  const Eigen::VectorXd w = lu.solve(b);

  double mean = 0.0, variance = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    mean += w[i] * values[i];
    variance += w[i] * b[i];
  }
  for (Eigen::Index k = 0; k < p; ++k) variance += w[n + k] * b[n + k];
  return {mean, std::max(0.0, variance)};
}

}  // namespace skybright
