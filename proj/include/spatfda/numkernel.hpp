#ifndef SPATFDA_NUMKERNEL_HPP
#define SPATFDA_NUMKERNEL_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "spatfda/errors.hpp"

namespace spatfda {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Only the small set of operations the
/// estimators need; this is not a general linear algebra library.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  Vector multiply(const Vector& x) const;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Symmetric matrix wrapper. Construction checks symmetry to 1e-12 relative
/// and stores the symmetrized average. Positive definiteness is not checked
/// here; the Cholesky routines apply the jitter policy and fail if the matrix
/// is genuinely indefinite.
class SpdMatrix {
public:
  explicit SpdMatrix(Matrix m);

  std::size_t dim() const { return mat_.rows(); }
  const Matrix& mat() const { return mat_; }

private:
  Matrix mat_;
};

/// Seed and stream id addressing one reproducible random stream. Identical
/// (seed, stream_id) pairs reproduce identical draw sequences; distinct
/// stream ids give statistically independent streams.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

/// xoshiro256++ generator with SplitMix64 state initialization from an
/// RngStream. Normal deviates use the Marsaglia polar method, so draws are
/// bitwise reproducible for a given stream on any platform.
class Rng {
public:
  explicit Rng(RngStream stream);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal deviate (polar method; second deviate is cached).
  double normal();

private:
  std::uint64_t state_[4];
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

/// Result of a Cholesky factorization, recording any diagonal jitter that had
/// to be added to make the factorization succeed.
struct CholeskyResult {
  Matrix lower;
  double jitter = 0.0;
};

/// Lower Cholesky factor of a, with the jitter escalation policy: first try
/// no jitter, then 1e-8*(trace/dim) on the diagonal, then 1e-6*(trace/dim).
/// Throws NotPositiveDefinite if all attempts fail.
CholeskyResult cholesky_factor(const SpdMatrix& a);

/// Solve a*x = b through the Cholesky factorization (same jitter policy).
Vector cholesky_solve(const SpdMatrix& a, const Vector& b);

/// Solve using a precomputed factor.
Vector cholesky_solve(const CholeskyResult& factor, const Vector& b);

struct SymEigenResult {
  Vector values;   // descending
  Matrix vectors;  // orthonormal columns, aligned with values
};

/// Full symmetric eigendecomposition by cyclic Jacobi sweeps (intended for
/// dimensions up to a few hundred). Eigenvalues are returned in descending
/// order; each eigenvector is normalized so its largest-magnitude entry is
/// positive. Throws ConvergenceFailure after 50 sweeps.
SymEigenResult sym_eigen(const Matrix& a);

using ResidualFn = std::function<Vector(const Vector& params)>;

struct NlsResult {
  Vector params;
  bool converged = false;
  double rss = 0.0;  // sum of squared residuals at the returned point
};

/// Box-constrained nonlinear least squares by Levenberg-Marquardt damping
/// with forward-difference Jacobians and up to 5 restarts from perturbed
/// initial points. converged=false signals a stall, the iteration limit, or
/// an active bound with an outward-pointing gradient.
NlsResult nls_fit(const ResidualFn& fn, Vector init, Vector lower, Vector upper);

/// P(chi^2_df > x) via the regularized incomplete gamma function.
double chisq_sf(double x, int df);

/// P(chi^2_df <= x). Computed by the series branch of the incomplete gamma,
/// independent of the continued-fraction branch used by chisq_sf for large x.
double chisq_cdf(double x, int df);

/// Draw L*z with z i.i.d. standard normal from the stream. The n normal
/// deviates are consumed in index order.
Vector mvn_sample(const Matrix& chol_lower, Rng& rng);
Vector mvn_sample(const Matrix& chol_lower, RngStream stream);

/// Sum of a multiset of doubles in value-sorted order. Used where a reduction
/// must not depend on input ordering (bitwise identical results under
/// permutation of the inputs).
double canonical_sum(Vector terms);

}  // namespace spatfda

#endif
