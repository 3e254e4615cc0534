#pragma once

#include <string>
#include <vector>

#include "skybright/geo.hpp"
#include "skybright/types.hpp"

namespace skybright {

enum class VariogramFamily { Spherical, Exponential, Gaussian };

VariogramFamily variogram_family_from_string(const std::string& name);
std::string to_string(VariogramFamily family);

/// Parametric semivariance model. `range_km` follows the practical-range
/// convention: the exponential and gaussian families reach ~95% of the sill
/// at h = range_km; the spherical family reaches it exactly.
struct VariogramModel {
  VariogramFamily family{VariogramFamily::Spherical};
  double nugget{0.0};
  double partial_sill{1.0};
  double range_km{1.0};

  double sill() const { return nugget + partial_sill; }
};

/// gamma(h) for the model; 0 at h = 0, nugget + partial_sill * f(h/range)
/// for h > 0. Throws for negative h.
double variogram_value(const VariogramModel& m, double h_km);

/// Binned empirical semivariogram.
struct EmpiricalVariogram {
  struct Bin {
    double h_km{0.0};       // mean pair distance in the bin
    double gamma{0.0};      // mean of 0.5 * (z_i - z_j)^2
    long pair_count{0};
  };
  std::vector<Bin> bins;  // populated bins only, ordered by h
  double cutoff_km{0.0};
  int n_bins{0};
};

/// All-pairs empirical variogram with equal-width lag bins on [0, cutoff].
/// Throws when no pair falls within the cutoff.
EmpiricalVariogram empirical_variogram(const std::vector<PlanarPoint>& points,
                                       const std::vector<double>& values,
                                       double cutoff_km, int n_bins);

/// Weighted-least-squares fit with weights Nh/h^2, multi-start bounded
/// Nelder-Mead over (nugget, partial sill, range). A flat empirical
/// variogram collapses to a pure-nugget model with a warning.
VariogramModel fit_variogram(const EmpiricalVariogram& emp, VariogramFamily family,
                             WarningLog* warnings = nullptr);

/// The WLS objective minimized by fit_variogram; exposed so independent
/// searches can be compared against the fitted optimum.
double variogram_wls_objective(const EmpiricalVariogram& emp,
                               const VariogramModel& m);

}  // namespace skybright
