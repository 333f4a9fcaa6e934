#include "spatfda/spatial_mean.hpp"

#include <cmath>

namespace spatfda {

WeightVector optimal_weights(const SpdMatrix& c) {
  const std::size_t n = c.dim();
  const Vector ones(n, 1.0);
  Vector v = cholesky_solve(c, ones);
  double total = 0.0;
  for (double x : v) total += x;
  if (total == 0.0 || !std::isfinite(total))
    throw NotPositiveDefinite("optimal_weights: degenerate normalization");
  for (double& x : v) x /= total;
  return WeightVector{std::move(v)};
}

WeightVector equal_weights(int n) {
  return WeightVector{Vector(static_cast<std::size_t>(n), 1.0 / n)};
}

Curve weighted_mean(const CurveSet& data, const WeightVector& weights) {
  if (static_cast<int>(weights.w.size()) != data.size())
    throw LengthMismatch("weighted_mean: weight count mismatch");
  Curve out = zero_curve(data.grid());
  for (int k = 0; k < data.size(); ++k) {
    const Vector& v = data.curve(k).values;
    const double w = weights.w[k];
    for (std::size_t j = 0; j < v.size(); ++j) out.values[j] += w * v[j];
  }
  return out;
}

Curve sample_mean(const CurveSet& data) {
  return weighted_mean(data, equal_weights(data.size()));
}

CurveSet center(const CurveSet& data, const Curve& mean) {
  std::vector<Curve> centered;
  centered.reserve(data.size());
  for (int k = 0; k < data.size(); ++k) centered.push_back(curve_sub(data.curve(k), mean));
  return CurveSet(std::move(centered), data.locations());
}

namespace {

double correlation_shape(CovKind kind, double d, double rho) {
  if (d == 0.0) return 1.0;
  if (kind == CovKind::Gaussian) return std::exp(-(d * d) / (rho * rho));
  return std::exp(-d / rho);
}

Matrix correlation_matrix(const Matrix& dists, CovKind kind, double rho) {
  const std::size_t n = dists.rows();
  Matrix c(n, n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    c(k, k) = 1.0;
    for (std::size_t l = k + 1; l < n; ++l) {
      const double v = correlation_shape(kind, dists(k, l), rho);
      c(k, l) = v;
      c(l, k) = v;
    }
  }
  return c;
}

struct PerTFit {
  bool success = false;
  double sigma2 = 0.0;
  double rho = 0.0;
};

std::vector<PerTFit> per_t_fits(const CurveSet& data, VarioEstimator estimator,
                                CovKind kind, const PairOrder& order) {
  const int m = data.grid().size();
  const int n = data.size();
  std::vector<PerTFit> fits(m);
  Vector values(n);
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < n; ++k) values[k] = data.curve(k).values[j];
    const DissimilarityCloud cloud = scalar_cloud(values, order);
    PerTFit& fit = fits[j];
    try {
      const EmpiricalVariogram emp = empirical_variogram(cloud, estimator);
      const CovModel model = fit_cov_model(emp, kind, /*with_nugget=*/false);
      if (model.kind != CovKind::Flat) {
        fit.success = true;
        fit.sigma2 = model.sigma2;
        fit.rho = model.rho;
      }
    } catch (const TooFewPairs&) {
      // constant slice; leave unsuccessful
    }
  }
  return fits;
}

}  // namespace

M1Pair estimate_mean_m1_both(const CurveSet& data, VarioEstimator estimator, CovKind kind) {
  const int n = data.size();
  if (n == 1) {
    M1Pair out{data.curve(0), data.curve(0), {}};
    out.diagnostics.success.assign(data.grid().size(), 0);
    return out;
  }

  const Matrix dists = distance_matrix(data.locations());
  const PairOrder order(dists);
  const std::vector<PerTFit> fits = per_t_fits(data, estimator, kind, order);

  M1Diagnostics diag;
  diag.success.resize(fits.size());
  int n_success = 0;
  for (std::size_t j = 0; j < fits.size(); ++j) {
    diag.success[j] = fits[j].success ? 1 : 0;
    n_success += fits[j].success ? 1 : 0;
  }
  diag.success_fraction = static_cast<double>(n_success) / fits.size();
  if (n_success == 0)
    throw AllFitsFailed("estimate_mean_m1: no grid point produced a structured fit");

  // Variant A: average the fitted covariances over the successful points
  // (quadrature over the success set, renormalized by its size).
  Matrix c_a(n, n, 0.0);
  for (const PerTFit& fit : fits) {
    if (!fit.success) continue;
    for (int k = 0; k < n; ++k) {
      c_a(k, k) += fit.sigma2;
      for (int l = k + 1; l < n; ++l) {
        const double v = fit.sigma2 * correlation_shape(kind, dists(k, l), fit.rho);
        c_a(k, l) += v;
        c_a(l, k) += v;
      }
    }
  }
  for (double& v : c_a.data()) v /= n_success;

  // Variant B: average the fitted ranges; covariance up to scale.
  double rho_bar = 0.0;
  for (const PerTFit& fit : fits)
    if (fit.success) rho_bar += fit.rho;
  rho_bar /= n_success;
  const Matrix c_b = correlation_matrix(dists, kind, rho_bar);

  M1Pair out{weighted_mean(data, optimal_weights(SpdMatrix(c_a))),
             weighted_mean(data, optimal_weights(SpdMatrix(c_b))), std::move(diag)};
  return out;
}

Curve estimate_mean_m1(const CurveSet& data, M1Variant variant, VarioEstimator estimator,
                       CovKind kind, M1Diagnostics* diag) {
  M1Pair pair = estimate_mean_m1_both(data, estimator, kind);
  if (diag != nullptr) *diag = pair.diagnostics;
  return variant == M1Variant::A ? std::move(pair.variant_a) : std::move(pair.variant_b);
}

Curve estimate_mean_m2(const CurveSet& data, VarioEstimator estimator, CovKind kind) {
  if (data.size() == 1) return data.curve(0);
  const DissimilarityCloud cloud = functional_cloud(data);
  CovModel model;
  try {
    const EmpiricalVariogram emp = empirical_variogram(cloud, estimator);
    model = fit_cov_model(emp, kind, /*with_nugget=*/false);
  } catch (const TooFewPairs&) {
    model.kind = CovKind::Flat;
  }
  if (model.kind == CovKind::Flat) return sample_mean(data);

  const Matrix c = correlation_matrix(distance_matrix(data.locations()), kind, model.rho);
  return weighted_mean(data, optimal_weights(SpdMatrix(c)));
}

ScalarMeanResult spatial_scalar_mean(const Vector& values, const PairOrder& order,
                                     const Matrix& dists, const ScalarMeanOptions& options) {
  ScalarMeanResult result;
  const int n = static_cast<int>(values.size());
  if (!options.force_flat && n > 1) {
    try {
      const DissimilarityCloud cloud = scalar_cloud(values, order);
      const EmpiricalVariogram emp =
          empirical_variogram(cloud, options.estimator, options.n_bins);
      result.model = fit_cov_model(emp, options.kind, options.with_nugget);
    } catch (const TooFewPairs&) {
      result.model.kind = CovKind::Flat;
    }
  }

  if (result.model.kind != CovKind::Flat) {
    const Matrix c = correlation_matrix(dists, options.kind, result.model.rho);
    const WeightVector w = optimal_weights(SpdMatrix(c));
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += w.w[k] * values[k];
    result.mean = acc;
    result.structured = true;
  } else {
    double acc = 0.0;
    for (double v : values) acc += v;
    result.mean = acc / n;
    result.model = CovModel{CovKind::Flat, 0.0, 0.0, 0.0};
    result.structured = false;
  }
  return result;
}

Curve estimate_mean_m3(const CurveSet& data, int K, VarioEstimator estimator, CovKind kind) {
  if (data.size() == 1) return data.curve(0);
  if (K <= 0) K = default_basis_size(data.grid().size());
  const BasisSet basis = fourier_basis(data.grid(), K);

  const int n = data.size();
  const Matrix dists = distance_matrix(data.locations());
  const PairOrder order(dists);

  // Coefficient fields <B_j, X(s_k)>.
  Matrix coeffs(n, K);
  for (int k = 0; k < n; ++k) {
    const Vector c = project_coeffs(data.curve(k), basis);
    for (int j = 0; j < K; ++j) coeffs(k, j) = c[j];
  }

  ScalarMeanOptions options;
  options.estimator = estimator;
  options.kind = kind;

  Vector mean_coeffs(K);
  Vector field(n);
  for (int j = 0; j < K; ++j) {
    for (int k = 0; k < n; ++k) field[k] = coeffs(k, j);
    mean_coeffs[j] = spatial_scalar_mean(field, order, dists, options).mean;
  }
  return synthesize(basis, mean_coeffs);
}

}  // namespace spatfda
