#ifndef SPATFDA_SPATIAL_MEAN_HPP
#define SPATFDA_SPATIAL_MEAN_HPP

#include <vector>

#include "spatfda/curveset.hpp"
#include "spatfda/variogram.hpp"

namespace spatfda {

/// Kriging-type weights: sum to one, signed entries allowed.
struct WeightVector {
  Vector w;
};

/// Solve the constrained minimization for the optimal averaging weights:
/// w = a * C^{-1} 1 with a chosen so the weights sum to one.
WeightVector optimal_weights(const SpdMatrix& c);

WeightVector equal_weights(int n);

/// Weighted average of the curves.
Curve weighted_mean(const CurveSet& data, const WeightVector& weights);

/// Pointwise average of the curves.
Curve sample_mean(const CurveSet& data);

/// Subtract a mean curve from every curve of the set.
CurveSet center(const CurveSet& data, const Curve& mean);

enum class M1Variant { A, B };

/// Per-time-point variogram fits shared by the two M1 variants.
struct M1Diagnostics {
  std::vector<char> success;  // one flag per grid point
  double success_fraction = 0.0;
};

/// Mean estimation through per-time-point scalar variogram fits. Variant A
/// integrates the fitted per-point covariances over the successful points;
/// variant B averages the fitted ranges and uses the resulting correlation
/// matrix (the weights need the covariance only up to scale). Throws
/// AllFitsFailed when no grid point yields a structured fit.
Curve estimate_mean_m1(const CurveSet& data, M1Variant variant, VarioEstimator estimator,
                       CovKind kind, M1Diagnostics* diag = nullptr);

struct M1Pair {
  Curve variant_a;
  Curve variant_b;
  M1Diagnostics diagnostics;
};

/// Both M1 variants from a single pass of per-point fits.
M1Pair estimate_mean_m1_both(const CurveSet& data, VarioEstimator estimator, CovKind kind);

/// Mean estimation through one functional-variogram fit. Degrades to the
/// sample mean when the fit is Flat.
Curve estimate_mean_m2(const CurveSet& data, VarioEstimator estimator, CovKind kind);

/// Mean estimation through per-basis-coefficient scalar fields: each
/// coefficient mean is a separately weighted average (Flat coefficients fall
/// back to the simple average), and the mean curve is synthesized from them.
/// K = 0 selects the default basis size rule.
Curve estimate_mean_m3(const CurveSet& data, int K, VarioEstimator estimator, CovKind kind);

/// Options for the scalar-field weighted mean shared by M3 and the FPC
/// machinery.
struct ScalarMeanOptions {
  VarioEstimator estimator = VarioEstimator::MT;
  CovKind kind = CovKind::Exponential;
  bool with_nugget = false;
  int n_bins = kDefaultVariogramBins;
  bool force_flat = false;
};

struct ScalarMeanResult {
  double mean = 0.0;
  CovModel model;
  bool structured = false;  // false means the Flat fallback was used
};

/// Estimate the constant mean of one scalar spatial field by fitting a
/// covariance model to its empirical variogram and applying the optimal
/// weights; falls back to the simple average for Flat fits.
ScalarMeanResult spatial_scalar_mean(const Vector& values, const PairOrder& order,
                                     const Matrix& dists, const ScalarMeanOptions& options);

}  // namespace spatfda

#endif
