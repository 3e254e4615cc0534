#include "skybright/variogram.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

namespace skybright {

VariogramFamily variogram_family_from_string(const std::string& name) {
  if (name == "spherical") return VariogramFamily::Spherical;
  if (name == "exponential") return VariogramFamily::Exponential;
  if (name == "gaussian") return VariogramFamily::Gaussian;
  throw Error("unknown variogram family '" + name +
              "' (expected spherical, exponential, or gaussian)");
}

std::string to_string(VariogramFamily family) {
  switch (family) {
    case VariogramFamily::Spherical: return "spherical";
    case VariogramFamily::Exponential: return "exponential";
    case VariogramFamily::Gaussian: return "gaussian";
  }
  return "?";
}

double variogram_value(const VariogramModel& m, double h_km) {
  if (h_km < 0.0 || !std::isfinite(h_km)) {
    throw Error("variogram lag must be a nonnegative distance");
  }
  if (h_km == 0.0) return 0.0;
  const double u = h_km / m.range_km;
  double f = 0.0;
  switch (m.family) {
    case VariogramFamily::Spherical:
      f = u >= 1.0 ? 1.0 : 1.5 * u - 0.5 * u * u * u;
      break;
    case VariogramFamily::Exponential:
      f = 1.0 - std::exp(-3.0 * u);
      break;
    case VariogramFamily::Gaussian:
      f = 1.0 - std::exp(-3.0 * u * u);
      break;
  }
  return m.nugget + m.partial_sill * f;
}

EmpiricalVariogram empirical_variogram(const std::vector<PlanarPoint>& points,
                                       const std::vector<double>& values,
                                       double cutoff_km, int n_bins) {
  if (points.size() != values.size()) {
    throw Error("variogram inputs differ in length");
  }
  if (points.size() < 2) throw Error("variogram needs at least 2 points");
  if (cutoff_km <= 0.0) throw Error("variogram cutoff must be positive");
  if (n_bins < 1) throw Error("variogram needs at least 1 bin");

  std::vector<double> gamma_sum(n_bins, 0.0);
  std::vector<double> dist_sum(n_bins, 0.0);
  std::vector<long> count(n_bins, 0);
  const double width = cutoff_km / n_bins;

  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double d = distance_km(points[i], points[j]);
      if (d > cutoff_km) continue;
      const int bin = std::min(n_bins - 1, static_cast<int>(d / width));
      const double dz = values[i] - values[j];
      gamma_sum[bin] += 0.5 * dz * dz;
      dist_sum[bin] += d;
      ++count[bin];
    }
  }

  EmpiricalVariogram emp;
  emp.cutoff_km = cutoff_km;
  emp.n_bins = n_bins;
  for (int b = 0; b < n_bins; ++b) {
    if (count[b] == 0) continue;
    emp.bins.push_back({dist_sum[b] / count[b], gamma_sum[b] / count[b], count[b]});
  }
  if (emp.bins.empty()) {
    throw Error("no point pair within the variogram cutoff of " +
                std::to_string(cutoff_km) + " km");
  }
  return emp;
}

double variogram_wls_objective(const EmpiricalVariogram& emp,
                               const VariogramModel& m) {
  double obj = 0.0;
  for (const auto& bin : emp.bins) {
    const double w = bin.pair_count / std::max(bin.h_km * bin.h_km, 1e-12);
    const double r = bin.gamma - variogram_value(m, bin.h_km);
    obj += w * r * r;
  }
  return obj;
}

namespace {

using Params = std::array<double, 3>;  // nugget, partial sill, range

// Bounded Nelder-Mead; parameters are clamped to the box at every
// evaluation so the simplex cannot wander into invalid models.
Params nelder_mead(const std::function<double(const Params&)>& f, Params start,
                   const Params& lo, const Params& hi, int max_iter) {
  auto clamp = [&](Params p) {
    for (int k = 0; k < 3; ++k) p[k] = std::min(hi[k], std::max(lo[k], p[k]));
    return p;
  };

  std::array<Params, 4> simplex;
  std::array<double, 4> value;
  simplex[0] = clamp(start);
  for (int k = 0; k < 3; ++k) {
    Params p = simplex[0];
    const double span = hi[k] - lo[k];
    p[k] += (p[k] + 0.1 * span <= hi[k]) ? 0.1 * span : -0.1 * span;
    simplex[k + 1] = clamp(p);
  }
  for (int v = 0; v < 4; ++v) value[v] = f(simplex[v]);

  for (int iter = 0; iter < max_iter; ++iter) {
    std::array<int, 4> order{0, 1, 2, 3};
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return value[a] < value[b]; });
    const int best = order[0], worst = order[3], second = order[2];
    if (value[worst] - value[best] <=
        1e-14 * (std::abs(value[best]) + std::abs(value[worst])) + 1e-300) {
      break;
    }

    Params centroid{0, 0, 0};
    for (int v = 0; v < 4; ++v) {
      if (v == worst) continue;
      for (int k = 0; k < 3; ++k) centroid[k] += simplex[v][k] / 3.0;
    }
    auto blend = [&](double t) {
      Params p;
      for (int k = 0; k < 3; ++k) {
        p[k] = centroid[k] + t * (centroid[k] - simplex[worst][k]);
      }
      return clamp(p);
    };

    const Params reflected = blend(1.0);
    const double fr = f(reflected);
    if (fr < value[best]) {
      const Params expanded = blend(2.0);
      const double fe = f(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        value[worst] = fe;
      } else {
        simplex[worst] = reflected;
        value[worst] = fr;
      }
    } else if (fr < value[second]) {
      simplex[worst] = reflected;
      value[worst] = fr;
    } else {
      const Params contracted = blend(fr < value[worst] ? 0.5 : -0.5);
      const double fc = f(contracted);
      if (fc < std::min(fr, value[worst])) {
        simplex[worst] = contracted;
        value[worst] = fc;
      } else {
        for (int v = 0; v < 4; ++v) {
          if (v == best) continue;
          for (int k = 0; k < 3; ++k) {
            simplex[v][k] = 0.5 * (simplex[v][k] + simplex[best][k]);
          }
          simplex[v] = clamp(simplex[v]);
          value[v] = f(simplex[v]);
        }
      }
    }
  }

  int best = 0;
  for (int v = 1; v < 4; ++v) {
    if (value[v] < value[best]) best = v;
  }
  return simplex[best];
}

}  // namespace

VariogramModel fit_variogram(const EmpiricalVariogram& emp, VariogramFamily family,
                             WarningLog* warnings) {
  if (emp.bins.size() < 3) {
    throw Error("variogram fit needs at least 3 populated bins, got " +
                std::to_string(emp.bins.size()));
  }

  double gmin = std::numeric_limits<double>::infinity();
  double gmax = -std::numeric_limits<double>::infinity();
  for (const auto& bin : emp.bins) {
    gmin = std::min(gmin, bin.gamma);
    gmax = std::max(gmax, bin.gamma);
  }
  if (gmax - gmin <= 1e-12 * std::max(1.0, std::abs(gmax))) {
    if (warnings != nullptr) {
      warnings->add("variogram: flat empirical variogram, using a pure-nugget model");
    }
    double mean = 0.0;
    for (const auto& bin : emp.bins) mean += bin.gamma / emp.bins.size();
    return {family, mean, 0.0, emp.cutoff_km};
  }

  // gmax stands in for the data variance when seeding starts; for a
  // stationary field the late-lag semivariance approaches var(z).
  const double scale = gmax;
  const Params lo{0.0, 0.0, std::max(1e-6, 1e-3 * emp.cutoff_km)};
  const Params hi{2.0 * scale, 2.5 * scale, 2.0 * emp.cutoff_km};

  auto objective = [&](const Params& p) {
    return variogram_wls_objective(emp, {family, p[0], p[1], p[2]});
  };

  bool found = false;
  Params best_p{};
  double best_obj = std::numeric_limits<double>::infinity();
  for (double nugget0 : {0.0, 0.5 * scale}) {
    for (double psill0 : {0.5 * scale, scale}) {
      for (double range0 : {0.25 * emp.cutoff_km, 0.5 * emp.cutoff_km}) {
        Params p{nugget0, psill0, range0};
        // Two restarts from the incumbent sharpen the converged simplex.
        for (int round = 0; round < 3; ++round) {
          p = nelder_mead(objective, p, lo, hi, 400);
        }
        const double obj = objective(p);
        if (std::isfinite(obj) && obj < best_obj) {
          best_obj = obj;
          best_p = p;
          found = true;
        }
      }
    }
  }
  if (!found) {
    throw Error("variogram fit failed from every start (family " +
                to_string(family) + ", " + std::to_string(emp.bins.size()) +
                " bins)");
  }
  return {family, best_p[0], best_p[1], best_p[2]};
}

}  // namespace skybright
