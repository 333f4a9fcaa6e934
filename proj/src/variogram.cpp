#include "spatfda/variogram.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace spatfda {

std::string to_string(CovKind kind) {
  switch (kind) {
    case CovKind::Exponential: return "exponential";
    case CovKind::Gaussian: return "gaussian";
    case CovKind::Flat: return "flat";
  }
  return "?";
}

std::string to_string(VarioEstimator est) {
  return est == VarioEstimator::MT ? "mt" : "ch";
}

double cov_eval(const CovModel& model, double d) {
  if (d < 0.0) throw DomainError("cov_eval: negative distance");
  switch (model.kind) {
    case CovKind::Flat:
      return d == 0.0 ? model.sigma2 : 0.0;
    case CovKind::Exponential:
      return (d == 0.0 ? model.c0 : 0.0) + model.sigma2 * std::exp(-d / model.rho);
    case CovKind::Gaussian:
      return (d == 0.0 ? model.c0 : 0.0) +
             model.sigma2 * std::exp(-(d * d) / (model.rho * model.rho));
  }
  return 0.0;
}

double correlation_eval(const CovModel& model, double d) {
  if (d == 0.0) return 1.0;
  const double at_zero = cov_eval(model, 0.0);
  if (at_zero <= 0.0) return 0.0;
  return cov_eval(model, d) / at_zero;
}

double variogram_eval(const CovModel& model, double d) {
  switch (model.kind) {
    case CovKind::Flat:
      return model.sigma2;
    case CovKind::Exponential:
      return model.c0 + model.sigma2 * (1.0 - std::exp(-d / model.rho));
    case CovKind::Gaussian:
      return model.c0 + model.sigma2 * (1.0 - std::exp(-(d * d) / (model.rho * model.rho)));
  }
  return 0.0;
}

PairOrder::PairOrder(const Matrix& dists) {
  if (dists.rows() != dists.cols()) throw LengthMismatch("PairOrder: matrix not square");
  n_ = static_cast<int>(dists.rows());
  order_.reserve(static_cast<std::size_t>(n_) * (n_ - 1) / 2);
  for (int k = 0; k < n_; ++k)
    for (int l = k + 1; l < n_; ++l) order_.emplace_back(k, l);
  std::stable_sort(order_.begin(), order_.end(),
                   [&](const std::pair<int, int>& a, const std::pair<int, int>& b) {
                     return dists(a.first, a.second) < dists(b.first, b.second);
                   });
  dist_.reserve(order_.size());
  for (const auto& [k, l] : order_) dist_.push_back(dists(k, l));
}

DissimilarityCloud scalar_cloud(const Vector& values, const PairOrder& order) {
  if (static_cast<int>(values.size()) != order.n())
    throw LengthMismatch("scalar_cloud: values do not match distance matrix");
  DissimilarityCloud cloud;
  cloud.pairs.reserve(order.pairs().size());
  for (std::size_t i = 0; i < order.pairs().size(); ++i) {
    const auto& [k, l] = order.pairs()[i];
    cloud.pairs.push_back({order.distances()[i], std::fabs(values[k] - values[l])});
  }
  return cloud;
}

DissimilarityCloud scalar_cloud(const Vector& values, const Matrix& dists) {
  return scalar_cloud(values, PairOrder(dists));
}

DissimilarityCloud functional_cloud(const CurveSet& curves) {
  if (curves.size() < 2) throw LengthMismatch("functional_cloud: need at least 2 curves");
  const PairOrder order(distance_matrix(curves.locations()));
  DissimilarityCloud cloud;
  cloud.pairs.reserve(order.pairs().size());
  const int m = curves.grid().size();
  for (std::size_t i = 0; i < order.pairs().size(); ++i) {
    const auto& [k, l] = order.pairs()[i];
    const Vector& a = curves.curve(k).values;
    const Vector& b = curves.curve(l).values;
    double acc = 0.0;
    for (int j = 0; j < m; ++j) {
      const double diff = a[j] - b[j];
      acc += diff * diff;
    }
    cloud.pairs.push_back({order.distances()[i], std::sqrt(acc / m)});
  }
  return cloud;
}

DissimilarityCloud hs_cloud(const CurveSet& curves) {
  if (curves.size() < 2) throw LengthMismatch("hs_cloud: need at least 2 curves");
  const int n = curves.size();
  Vector norm2(n);
  for (int k = 0; k < n; ++k)
    norm2[k] = inner_product(curves.curve(k), curves.curve(k));

  const PairOrder order(distance_matrix(curves.locations()));
  DissimilarityCloud cloud;
  cloud.pairs.reserve(order.pairs().size());
  for (std::size_t i = 0; i < order.pairs().size(); ++i) {
    const auto& [k, l] = order.pairs()[i];
    const double cross = inner_product(curves.curve(k), curves.curve(l));
    const double hs2 = norm2[k] * norm2[k] + norm2[l] * norm2[l] - 2.0 * cross * cross;
    cloud.pairs.push_back({order.distances()[i], std::sqrt(std::max(0.0, hs2))});
  }
  return cloud;
}

EmpiricalVariogram empirical_variogram(const DissimilarityCloud& cloud,
                                       VarioEstimator estimator, int n_bins) {
  if (n_bins < 3) throw DomainError("empirical_variogram: need at least 3 bins");
  if (cloud.pairs.empty()) throw TooFewPairs("empirical_variogram: empty cloud");

  double dmax = 0.0;
  for (const DissimPair& p : cloud.pairs) dmax = std::max(dmax, p.distance);
  if (dmax <= 0.0) throw TooFewPairs("empirical_variogram: all distances zero");
  const double width = dmax / n_bins;

  std::vector<double> acc(n_bins, 0.0);
  std::vector<int> count(n_bins, 0);
  for (const DissimPair& p : cloud.pairs) {
    int b = static_cast<int>(p.distance / width);
    if (b >= n_bins) b = n_bins - 1;
    if (estimator == VarioEstimator::MT) {
      acc[b] += p.dissim * p.dissim;
    } else {
      acc[b] += std::sqrt(p.dissim);
    }
    count[b] += 1;
  }

  EmpiricalVariogram emp;
  emp.max_distance = dmax;
  for (int b = 0; b < n_bins; ++b) {
    if (count[b] < 1) continue;
    VariogramBin bin;
    bin.center = (b + 0.5) * width;
    bin.pairs = count[b];
    const double mean = acc[b] / count[b];
    if (estimator == VarioEstimator::MT) {
      bin.gamma = mean;
    } else {
      const double m4 = mean * mean * mean * mean;
      bin.gamma = m4 / (0.457 + 0.494 / count[b]);
    }
    emp.bins.push_back(bin);
  }
  if (emp.bins.empty()) throw TooFewPairs("empirical_variogram: no occupied bins");
  return emp;
}

double variogram_wrss(const CovModel& model, const EmpiricalVariogram& emp) {
  double rss = 0.0;
  for (const VariogramBin& bin : emp.bins) {
    const double r = variogram_eval(model, bin.center) - bin.gamma;
    rss += bin.pairs * r * r;
  }
  return rss;
}

namespace {

CovModel flat_fallback(const EmpiricalVariogram& emp) {
  double level = 0.0;
  for (const VariogramBin& bin : emp.bins) level += bin.gamma;
  level /= static_cast<double>(emp.bins.size());
  return CovModel{CovKind::Flat, 0.0, level, 0.0};
}

}  // namespace

CovModel fit_cov_model(const EmpiricalVariogram& emp, CovKind kind, bool with_nugget) {
  if (kind == CovKind::Flat) return flat_fallback(emp);
  if (static_cast<int>(emp.bins.size()) < 3) return flat_fallback(emp);

  double gmax = 0.0;
  double weight_total = 0.0;
  for (const VariogramBin& bin : emp.bins) {
    gmax = std::max(gmax, bin.gamma);
    weight_total += bin.pairs;
  }
  const double dmax = emp.max_distance;
  const double first_center = emp.bins.front().center;

  const CovModel flat = flat_fallback(emp);
  const double flat_rss = variogram_wrss(flat, emp);
  // Perfectly flat bins carry no range information at all.
  const double data_scale = std::max(gmax * gmax * weight_total, 1e-300);
  if (flat_rss <= 1e-20 * data_scale) return flat;
  if (gmax <= 0.0) return flat;

  // The nugget and sill enter the model linearly, so they can be profiled
  // out exactly on a grid of ranges; the best grid point initializes the NLS
  // polish. This sidesteps the flat ridges (tiny or huge rho) that trap
  // gradient iterations started far from the optimum.
  const double rho_lo = 1e-3 * dmax;
  const double rho_hi = 100.0 * dmax;
  const auto shape = [&](double d, double rho) {
    return kind == CovKind::Gaussian ? 1.0 - std::exp(-(d * d) / (rho * rho))
                                     : 1.0 - std::exp(-d / rho);
  };
  double best_rss = flat_rss;
  double best_rho = dmax / 3.0, best_c0 = 0.0, best_sigma2 = gmax;
  const double grid_lo = std::max(rho_lo, first_center / 4.0);
  const double grid_hi = 20.0 * dmax;
  const int grid_points = 25;
  for (int gp = 0; gp < grid_points; ++gp) {
    const double rho =
        grid_lo * std::pow(grid_hi / grid_lo, gp / static_cast<double>(grid_points - 1));
    // weighted least squares in (c0, sigma2) for this rho
    double sw = 0, sg = 0, sgg = 0, sy = 0, sgy = 0;
    for (const VariogramBin& bin : emp.bins) {
      const double w = bin.pairs;
      const double g = shape(bin.center, rho);
      sw += w;
      sg += w * g;
      sgg += w * g * g;
      sy += w * bin.gamma;
      sgy += w * g * bin.gamma;
    }
    double c0 = 0.0, sigma2 = 0.0;
    const double det = sw * sgg - sg * sg;
    if (with_nugget && std::fabs(det) > 1e-12 * sw * sgg) {
      c0 = (sgg * sy - sg * sgy) / det;
      sigma2 = (sw * sgy - sg * sy) / det;
    }
    if (!with_nugget || c0 < 0.0 || sigma2 < 0.0) {
      c0 = 0.0;
      sigma2 = sgg > 0.0 ? std::max(0.0, sgy / sgg) : 0.0;
    }
    const CovModel trial{kind, c0, std::max(sigma2, 1e-12 * gmax), rho};
    const double rss = variogram_wrss(trial, emp);
    if (rss < best_rss) {
      best_rss = rss;
      best_rho = rho;
      best_c0 = c0;
      best_sigma2 = trial.sigma2;
    }
  }

  Vector init, lo, hi;
  if (with_nugget) {
    init = {best_c0, best_sigma2, best_rho};
    lo = {0.0, 1e-12 * gmax, rho_lo};
    hi = {2.0 * gmax, 10.0 * gmax, rho_hi};
  } else {
    init = {best_sigma2, best_rho};
    lo = {1e-12 * gmax, rho_lo};
    hi = {10.0 * gmax, rho_hi};
  }

  const auto residual = [&](const Vector& params) {
    CovModel m;
    m.kind = kind;
    if (with_nugget) {
      m.c0 = params[0];
      m.sigma2 = params[1];
      m.rho = params[2];
    } else {
      m.sigma2 = params[0];
      m.rho = params[1];
    }
    Vector r(emp.bins.size());
    for (std::size_t b = 0; b < emp.bins.size(); ++b) {
      const VariogramBin& bin = emp.bins[b];
      r[b] = std::sqrt(static_cast<double>(bin.pairs)) *
             (variogram_eval(m, bin.center) - bin.gamma);
    }
    return r;
  };

  const NlsResult fit = nls_fit(residual, init, lo, hi);
  CovModel model;
  model.kind = kind;
  if (with_nugget) {
    model.c0 = fit.params[0];
    model.sigma2 = fit.params[1];
    model.rho = fit.params[2];
  } else {
    model.sigma2 = fit.params[0];
    model.rho = fit.params[1];
  }

  if (!fit.converged) return flat;
  if (model.rho > 10.0 * dmax) return flat;
  if (model.rho < first_center / 3.0) return flat;
  // Nugget fits can chase station-composition ripples, so they must beat the
  // flat level decisively and carry most of the level in the partial sill;
  // nugget-free fits only need to clear near-ties.
  if (fit.rss > (with_nugget ? 0.75 : 0.9) * flat_rss) return flat;
  if (with_nugget && model.sigma2 < model.c0) return flat;
  return model;
}

void write_variogram_csv(const std::string& path, const EmpiricalVariogram& emp) {
  std::ofstream out(path);
  if (!out) throw FileFormat("cannot write variogram file: " + path);
  out << "bin_center,gamma,pairs\n";
  out.precision(17);
  for (const VariogramBin& bin : emp.bins)
    out << bin.center << "," << bin.gamma << "," << bin.pairs << "\n";
}

}  // namespace spatfda
