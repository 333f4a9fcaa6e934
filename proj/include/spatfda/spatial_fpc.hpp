#ifndef SPATFDA_SPATIAL_FPC_HPP
#define SPATFDA_SPATIAL_FPC_HPP

#include <vector>

#include "spatfda/spatial_mean.hpp"

namespace spatfda {

/// Estimated functional principal components. The components are orthonormal
/// curves with descending positive eigenvalues; the full spectrum of the
/// basis-coefficient eigenproblem is kept for variance-explained rules and
/// diagnostics (plug-in estimation can make trailing entries negative; those
/// components are discarded).
struct FpcSet {
  std::vector<Curve> components;
  Vector eigenvalues;  // matches components
  Vector spectrum;     // all K eigenvalues, descending
  int basis_K = 0;
};

/// Scores xi_i(s_k) = <X(s_k) - mu, v_i> for each location and component.
struct ScoreField {
  Matrix values;  // N x p
  LocationSet locations;
};

/// Smallest p whose leading eigenvalues explain at least `fraction` of the
/// total positive spectrum.
int select_p_by_variance(const Vector& spectrum, double fraction = 0.85);

/// Equal-weight covariance eigendecomposition in basis coordinates (the
/// standard estimator for independent curves). Input must be centered.
/// p = 0 selects p by the 85% variance rule; K = 0 uses the default rule.
FpcSet standard_fpc(const CurveSet& centered, int K, int p);

enum class FpcWeighting { Fitted, ForceFlat };

/// CM2: weights from a fitted Hilbert-Schmidt variogram minimize the expected
/// Hilbert-Schmidt error of the weighted covariance; eigendecomposition as in
/// the standard estimator. Flat fits (or ForceFlat) reduce to equal weights.
FpcSet estimate_fpc_cm2(const CurveSet& centered, int K, int p, VarioEstimator estimator,
                        CovKind kind, FpcWeighting weighting = FpcWeighting::Fitted);

/// CM3: each second-moment entry E[xi_i xi_j] is estimated as an optimally
/// weighted average of the scalar field xi_i(s) xi_j(s) with its own fitted
/// covariance model (Flat fields fall back to the simple average); the
/// symmetrized matrix is then diagonalized.
FpcSet estimate_fpc_cm3(const CurveSet& centered, int K, int p, VarioEstimator estimator,
                        CovKind kind, FpcWeighting weighting = FpcWeighting::Fitted);

/// Project mean-corrected curves on the estimated components.
ScoreField scores(const CurveSet& data, const Curve& mean, const FpcSet& fpcs);

}  // namespace spatfda

#endif
