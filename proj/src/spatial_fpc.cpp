#include "spatfda/spatial_fpc.hpp"

#include <cmath>

namespace spatfda {

int select_p_by_variance(const Vector& spectrum, double fraction) {
  double total = 0.0;
  for (double v : spectrum)
    if (v > 0.0) total += v;
  if (total <= 0.0) return 1;
  double acc = 0.0;
  int p = 0;
  for (double v : spectrum) {
    if (v <= 0.0) break;
    acc += v;
    ++p;
    if (acc >= fraction * total) break;
  }
  return std::max(p, 1);
}

namespace {

Matrix coefficient_matrix(const CurveSet& data, const BasisSet& basis) {
  const int n = data.size();
  const int K = basis.size();
  Matrix coeffs(n, K);
  for (int k = 0; k < n; ++k) {
    const Vector c = project_coeffs(data.curve(k), basis);
    for (int j = 0; j < K; ++j) coeffs(k, j) = c[j];
  }
  return coeffs;
}

/// Weighted second-moment matrix S_{j,a} = sum_k w_k F_{kj} F_{ka}.
Matrix weighted_moment_matrix(const Matrix& coeffs, const Vector& weights) {
  const std::size_t n = coeffs.rows();
  const std::size_t K = coeffs.cols();
  Matrix s(K, K, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double w = weights[k];
    const double* row = coeffs.data().data() + k * K;
    for (std::size_t j = 0; j < K; ++j) {
      const double wj = w * row[j];
      double* srow = s.data().data() + j * K;
      for (std::size_t a = j; a < K; ++a) srow[a] += wj * row[a];
    }
  }
  for (std::size_t j = 0; j < K; ++j)
    for (std::size_t a = 0; a < j; ++a) s(j, a) = s(a, j);
  return s;
}

FpcSet fpc_from_moment_matrix(const Matrix& s, const BasisSet& basis, int p) {
  const SymEigenResult eig = sym_eigen(s);
  FpcSet out;
  out.basis_K = basis.size();
  out.spectrum = eig.values;
  if (p <= 0) p = select_p_by_variance(eig.values);
  p = std::min(p, basis.size());

  for (int j = 0; j < p; ++j) {
    if (eig.values[j] <= 0.0) break;  // indefinite tail: discard
    Vector coeff(basis.size());
    for (int a = 0; a < basis.size(); ++a) coeff[a] = eig.vectors(a, j);
    out.components.push_back(synthesize(basis, coeff));
    out.eigenvalues.push_back(eig.values[j]);
  }
  if (out.components.empty())
    throw ConvergenceFailure("fpc estimation: no positive eigenvalues");
  return out;
}

int resolve_k(const CurveSet& data, int K) {
  if (K <= 0) return default_basis_size(data.grid().size());
  return K;
}

}  // namespace

FpcSet standard_fpc(const CurveSet& centered, int K, int p) {
  K = resolve_k(centered, K);
  const BasisSet basis = fourier_basis(centered.grid(), K);
  const Matrix coeffs = coefficient_matrix(centered, basis);
  const Matrix s = weighted_moment_matrix(coeffs, equal_weights(centered.size()).w);
  return fpc_from_moment_matrix(s, basis, p);
}

FpcSet estimate_fpc_cm2(const CurveSet& centered, int K, int p, VarioEstimator estimator,
                        CovKind kind, FpcWeighting weighting) {
  K = resolve_k(centered, K);
  const BasisSet basis = fourier_basis(centered.grid(), K);
  const Matrix coeffs = coefficient_matrix(centered, basis);

  WeightVector weights = equal_weights(centered.size());
  if (weighting == FpcWeighting::Fitted && centered.size() > 1) {
    CovModel model;
    try {
      const DissimilarityCloud cloud = hs_cloud(centered);
      const EmpiricalVariogram emp = empirical_variogram(cloud, estimator);
      model = fit_cov_model(emp, kind, /*with_nugget=*/false);
    } catch (const TooFewPairs&) {
      model.kind = CovKind::Flat;
    }
    if (model.kind != CovKind::Flat) {
      const Matrix dists = distance_matrix(centered.locations());
      const int n = centered.size();
      Matrix kappa(n, n, 0.0);
      for (int k = 0; k < n; ++k) {
        kappa(k, k) = 1.0;
        for (int l = k + 1; l < n; ++l) {
          const double v = correlation_eval(model, dists(k, l));
          kappa(k, l) = v;
          kappa(l, k) = v;
        }
      }
      weights = optimal_weights(SpdMatrix(kappa));
    }
  }

  const Matrix s = weighted_moment_matrix(coeffs, weights.w);
  return fpc_from_moment_matrix(s, basis, p);
}

FpcSet estimate_fpc_cm3(const CurveSet& centered, int K, int p, VarioEstimator estimator,
                        CovKind kind, FpcWeighting weighting) {
  K = resolve_k(centered, K);
  const BasisSet basis = fourier_basis(centered.grid(), K);
  const Matrix coeffs = coefficient_matrix(centered, basis);
  const int n = centered.size();

  const Matrix dists = distance_matrix(centered.locations());
  const PairOrder order(dists);
  ScalarMeanOptions options;
  options.estimator = estimator;
  options.kind = kind;
  options.force_flat = (weighting == FpcWeighting::ForceFlat) || n == 1;

  // Upper triangle of r_ij = E[xi_i xi_j], then symmetrize.
  Matrix r(K, K, 0.0);
  Vector field(n);
  for (int i = 0; i < K; ++i) {
    for (int j = i; j < K; ++j) {
      for (int k = 0; k < n; ++k) field[k] = coeffs(k, i) * coeffs(k, j);
      const double value = spatial_scalar_mean(field, order, dists, options).mean;
      r(i, j) = value;
      r(j, i) = value;
    }
  }
  return fpc_from_moment_matrix(r, basis, p);
}

ScoreField scores(const CurveSet& data, const Curve& mean, const FpcSet& fpcs) {
  const int n = data.size();
  const int p = static_cast<int>(fpcs.components.size());
  if (p == 0) throw LengthMismatch("scores: empty component set");
  for (const Curve& v : fpcs.components)
    if (v.grid != data.grid()) throw GridMismatch("scores: component grid mismatch");
  if (mean.grid != data.grid()) throw GridMismatch("scores: mean grid mismatch");

  Matrix s(n, p);
  for (int k = 0; k < n; ++k) {
    const Curve centered = curve_sub(data.curve(k), mean);
    for (int i = 0; i < p; ++i) s(k, i) = inner_product(centered, fpcs.components[i]);
  }
  return ScoreField{std::move(s), data.locations()};
}

}  // namespace spatfda
