#include "spatfda/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace spatfda {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector Matrix::multiply(const Vector& x) const {
  if (x.size() != cols_) throw LengthMismatch("Matrix::multiply: size mismatch");
  Vector y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double acc = 0.0;
    const double* row = data_.data() + i * cols_;
    for (std::size_t j = 0; j < cols_; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
  return y;
}

SpdMatrix::SpdMatrix(Matrix m) : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols()) throw DomainError("SpdMatrix: matrix not square");
  const std::size_t n = mat_.rows();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::fabs(mat_(i, j)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double diff = std::fabs(mat_(i, j) - mat_(j, i));
      if (diff > 1e-12 * std::max(1.0, scale))
        throw DomainError("SpdMatrix: matrix not symmetric");
      const double avg = 0.5 * (mat_(i, j) + mat_(j, i));
      mat_(i, j) = avg;
      mat_(j, i) = avg;
    }
  }
}

// ---------------------------------------------------------------------------
// Random numbers: SplitMix64 seeding, xoshiro256++ core, polar-method normals.
// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(RngStream stream) {
  // Hash seed and stream id together so distinct stream ids decorrelate the
  // full state, not just one word.
  std::uint64_t s = stream.seed;
  const std::uint64_t id_mix = splitmix64(stream.stream_id) ^ 0xD1B54A32D192ED03ULL;
  s ^= id_mix;
  state_[0] = splitmix64(s);
  state_[1] = splitmix64(s);
  state_[2] = splitmix64(s);
  state_[3] = splitmix64(s);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  cached_normal_ = v * f;
  has_cached_ = true;
  return u * f;
}

// ---------------------------------------------------------------------------
// Cholesky with jitter escalation.
// ---------------------------------------------------------------------------

namespace {

// Plain lower Cholesky; returns false on a nonpositive pivot.
bool try_cholesky(const Matrix& a, double jitter, Matrix& lower) {
  const std::size_t n = a.rows();
  lower = Matrix(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = a(i, j);
      if (i == j) sum += jitter;
      for (std::size_t k = 0; k < j; ++k) sum -= lower(i, k) * lower(j, k);
      if (i == j) {
        if (sum <= 0.0 || !std::isfinite(sum)) return false;
        lower(i, i) = std::sqrt(sum);
      } else {
        lower(i, j) = sum / lower(j, j);
      }
    }
  }
  return true;
}

}  // namespace

CholeskyResult cholesky_factor(const SpdMatrix& a) {
  const std::size_t n = a.dim();
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += a.mat()(i, i);
  const double base = trace / static_cast<double>(n);

  CholeskyResult result;
  for (double jitter : {0.0, 1e-8 * base, 1e-6 * base}) {
    if (try_cholesky(a.mat(), jitter, result.lower)) {
      result.jitter = jitter;
      return result;
    }
    if (base <= 0.0) break;  // jitter cannot grow from a nonpositive trace
  }
  throw NotPositiveDefinite("cholesky_factor: matrix not positive definite after jitter");
}

Vector cholesky_solve(const CholeskyResult& factor, const Vector& b) {
  const Matrix& l = factor.lower;
  const std::size_t n = l.rows();
  if (b.size() != n) throw LengthMismatch("cholesky_solve: dimension mismatch");
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = b[i];
    for (std::size_t k = 0; k < i; ++k) sum -= l(i, k) * y[k];
    y[i] = sum / l(i, i);
  }
  Vector x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double sum = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) sum -= l(k, ii) * x[k];
    x[ii] = sum / l(ii, ii);
  }
  return x;
}

Vector cholesky_solve(const SpdMatrix& a, const Vector& b) {
  const CholeskyResult factor = cholesky_factor(a);
  Vector x = cholesky_solve(factor, b);
  // One round of iterative refinement against the unjittered matrix.
  Vector r = a.mat().multiply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  const Vector dx = cholesky_solve(factor, r);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
  return x;
}

// ---------------------------------------------------------------------------
// Cyclic Jacobi eigendecomposition.
// ---------------------------------------------------------------------------

SymEigenResult sym_eigen(const Matrix& input) {
  if (input.rows() != input.cols()) throw DomainError("sym_eigen: matrix not square");
  const std::size_t n = input.rows();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::fabs(input(i, j)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::fabs(input(i, j) - input(j, i)) > 1e-10 * std::max(1.0, scale))
        throw DomainError("sym_eigen: matrix not symmetric");

  Matrix a = input;
  Matrix v = Matrix::identity(n);

  const int max_sweeps = 50;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (std::sqrt(off) <= 1e-15 * std::max(1.0, scale) * static_cast<double>(n)) break;
    if (sweep == max_sweeps - 1)
      throw ConvergenceFailure("sym_eigen: Jacobi sweeps did not converge");

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::fabs(apq) <= 1e-18 * std::max(1.0, scale)) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Vector diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return diag[x] > diag[y]; });

  SymEigenResult result;
  result.values.resize(n);
  result.vectors = Matrix(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    const std::size_t src = order[col];
    result.values[col] = diag[src];
    // Sign convention: the largest-magnitude entry is positive.
    std::size_t imax = 0;
    double vmax = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (std::fabs(v(k, src)) > vmax) {
        vmax = std::fabs(v(k, src));
        imax = k;
      }
    }
    const double sgn = v(imax, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < n; ++k) result.vectors(k, col) = sgn * v(k, src);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Levenberg-Marquardt with box bounds.
// ---------------------------------------------------------------------------

namespace {

Vector clamp_params(Vector p, const Vector& lo, const Vector& hi) {
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::clamp(p[i], lo[i], hi[i]);
  return p;
}

double cost_of(const Vector& r) {
  double c = 0.0;
  for (double v : r) c += v * v;
  return c;
}

struct LmOutcome {
  Vector params;
  double rss = std::numeric_limits<double>::infinity();
  bool met_tolerance = false;
  bool saturated = false;
};

LmOutcome lm_run(const ResidualFn& fn, Vector theta, const Vector& lo, const Vector& hi) {
  constexpr int kMaxIter = 200;
  constexpr double kFtol = 1e-12;
  constexpr double kXtol = 1e-10;
  constexpr double kGtol = 1e-10;

  const std::size_t np = theta.size();
  Vector r = fn(theta);
  double cost = cost_of(r);
  const std::size_t nr = r.size();

  double lambda = 1e-3;
  bool met_tol = false;
  Vector grad(np, 0.0);

  for (int iter = 0; iter < kMaxIter; ++iter) {
    // Forward-difference Jacobian (backward at the upper bound).
    Matrix jac(nr, np);
    for (std::size_t p = 0; p < np; ++p) {
      const double span = hi[p] - lo[p];
      double h = 1e-6 * std::max({std::fabs(theta[p]), 1e-3 * span, 1e-10});
      double direction = 1.0;
      if (theta[p] + h > hi[p]) direction = -1.0;
      Vector tp = theta;
      tp[p] += direction * h;
      const Vector rp = fn(tp);
      for (std::size_t i = 0; i < nr; ++i) jac(i, p) = direction * (rp[i] - r[i]) / h;
    }

    Matrix jtj(np, np);
    for (std::size_t p = 0; p < np; ++p) {
      grad[p] = 0.0;
      for (std::size_t i = 0; i < nr; ++i) grad[p] += jac(i, p) * r[i];
      for (std::size_t q = p; q < np; ++q) {
        double acc = 0.0;
        for (std::size_t i = 0; i < nr; ++i) acc += jac(i, p) * jac(i, q);
        jtj(p, q) = acc;
        jtj(q, p) = acc;
      }
    }

    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::fabs(g));
    if (gmax <= kGtol * std::max(1.0, cost)) {
      met_tol = true;
      break;
    }

    bool stepped = false;
    for (int attempt = 0; attempt < 40 && !stepped; ++attempt) {
      Matrix damped = jtj;
      for (std::size_t p = 0; p < np; ++p)
        damped(p, p) += lambda * std::max(jtj(p, p), 1e-12);
      Matrix lfac;
      if (!try_cholesky(damped, 0.0, lfac)) {
        lambda *= 10.0;
        continue;
      }
      // Solve damped * delta = -grad.
      Vector rhs(np);
      for (std::size_t p = 0; p < np; ++p) rhs[p] = -grad[p];
      Vector y(np);
      for (std::size_t i = 0; i < np; ++i) {
        double sum = rhs[i];
        for (std::size_t k = 0; k < i; ++k) sum -= lfac(i, k) * y[k];
        y[i] = sum / lfac(i, i);
      }
      Vector delta(np);
      for (std::size_t ii = np; ii-- > 0;) {
        double sum = y[ii];
        for (std::size_t k = ii + 1; k < np; ++k) sum -= lfac(k, ii) * delta[k];
        delta[ii] = sum / lfac(ii, ii);
      }

      // Cap the relative step: an uncapped gain-ratio step can vault across
      // the cost well onto a flat ridge (range collapse) and get accepted
      // because the ridge still improves on the start.
      double shrink = 1.0;
      for (std::size_t p = 0; p < np; ++p) {
        const double span = hi[p] - lo[p];
        const double cap = std::max(0.5 * std::fabs(theta[p]),
                                    std::isfinite(span) ? 0.05 * span : 1.0);
        if (cap > 0.0 && std::fabs(delta[p]) > cap)
          shrink = std::min(shrink, cap / std::fabs(delta[p]));
      }
      Vector trial = clamp_params([&] {
        Vector t = theta;
        for (std::size_t p = 0; p < np; ++p) t[p] += shrink * delta[p];
        return t;
      }(), lo, hi);
      const Vector rt = fn(trial);
      const double trial_cost = cost_of(rt);
      if (trial_cost < cost) {
        double step = 0.0, base = kXtol;
        for (std::size_t p = 0; p < np; ++p) {
          step += (trial[p] - theta[p]) * (trial[p] - theta[p]);
          base += theta[p] * theta[p];
        }
        const bool small_step = std::sqrt(step) <= kXtol * std::sqrt(base);
        const bool small_decrease = (cost - trial_cost) <= kFtol * std::max(cost, 1e-300);
        theta = trial;
        r = rt;
        cost = trial_cost;
        lambda = std::max(lambda / 3.0, 1e-12);
        stepped = true;
        if (small_step || small_decrease) {
          met_tol = true;
        }
      } else {
        lambda *= 4.0;
      }
    }
    if (!stepped) {
      // Damping exhausted: no descent direction left, treat as stationary.
      met_tol = true;
      break;
    }
    if (met_tol) break;
  }

  // Bound saturation: an active bound with the gradient pushing outward means
  // the unconstrained optimum lies outside the box. A parameter resting on a
  // zero lower bound is exempt: nonnegativity constraints (a nugget, a sill)
  // reaching zero are ordinary constrained optima, not failures.
  bool saturated = false;
  for (std::size_t p = 0; p < np; ++p) {
    const double span = hi[p] - lo[p];
    const double edge = 1e-9 * std::max(span, 1e-30);
    const double gtol_here = 1e-7 * std::max(1.0, cost);
    if (theta[p] >= hi[p] - edge && -grad[p] > gtol_here) saturated = true;
    const bool zero_lower = lo[p] >= 0.0 && lo[p] <= 1e-10 * std::max(span, 1.0);
    if (theta[p] <= lo[p] + edge && -grad[p] < -gtol_here && !zero_lower) saturated = true;
  }

  LmOutcome out;
  out.params = std::move(theta);
  out.rss = cost;
  out.met_tolerance = met_tol;
  out.saturated = saturated;
  return out;
}

}  // namespace

namespace {

// A run that ends pinned near a bound usually means the iteration fell onto a
// flat ridge (overshooting a scale parameter does this); restarts from fresh
// box positions recover the interior optimum when one exists.
bool near_any_bound(const Vector& theta, const Vector& lo, const Vector& hi) {
  for (std::size_t p = 0; p < theta.size(); ++p) {
    const double span = hi[p] - lo[p];
    if (!std::isfinite(span) || span <= 0.0) continue;
    const double edge = 1e-3 * span;
    if (theta[p] <= lo[p] + edge || theta[p] >= hi[p] - edge) return true;
  }
  return false;
}

}  // namespace

NlsResult nls_fit(const ResidualFn& fn, Vector init, Vector lower, Vector upper) {
  const std::size_t np = init.size();
  if (lower.size() != np || upper.size() != np)
    throw LengthMismatch("nls_fit: bounds size mismatch");
  for (std::size_t p = 0; p < np; ++p)
    if (lower[p] > upper[p]) throw DomainError("nls_fit: lower bound above upper bound");

  init = clamp_params(std::move(init), lower, upper);

  LmOutcome best = lm_run(fn, init, lower, upper);
  std::uint64_t mix = 0x6A09E667F3BCC908ULL;
  for (int restart = 0; restart < 5; ++restart) {
    const bool best_clean = best.met_tolerance && !best.saturated;
    if (best_clean && !near_any_bound(best.params, lower, upper)) break;
    Vector start(np);
    for (std::size_t p = 0; p < np; ++p) {
      const double u = static_cast<double>(splitmix64(mix) >> 11) * 0x1.0p-53;
      const double span = upper[p] - lower[p];
      if (lower[p] >= 0.0 && init[p] > 0.0) {
        // scale-like parameter: explore two decades around the initial point
        start[p] = init[p] * std::pow(10.0, 2.0 * (u - 0.5));
      } else if (std::isfinite(span) && span > 0.0) {
        start[p] = lower[p] + (0.1 + 0.8 * u) * span;
      } else {
        start[p] = init[p] * (0.5 + u) + (u - 0.5);
      }
    }
    const LmOutcome attempt = lm_run(fn, clamp_params(std::move(start), lower, upper),
                                     lower, upper);
    const bool attempt_clean = attempt.met_tolerance && !attempt.saturated;
    if ((attempt_clean && !best_clean) ||
        (attempt_clean == best_clean && attempt.rss < best.rss)) {
      best = attempt;
    }
  }

  NlsResult result;
  result.params = best.params;
  result.rss = best.rss;
  result.converged = best.met_tolerance && !best.saturated;
  return result;
}

// ---------------------------------------------------------------------------
// Regularized incomplete gamma (series and continued fraction branches).
// ---------------------------------------------------------------------------

namespace {

constexpr int kGammaMaxIter = 500;
constexpr double kGammaEps = 1e-15;

// Lower regularized P(a, x) by power series; valid for x < a + 1.
double gamma_p_series(double a, double x) {
  if (x <= 0.0) return 0.0;
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int i = 0; i < kGammaMaxIter; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kGammaEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized Q(a, x) by modified Lentz continued fraction; x >= a + 1.
double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kGammaMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kGammaEps) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double chisq_sf(double x, int df) {
  if (df <= 0) throw DomainError("chisq_sf: df must be positive");
  if (x < 0.0) throw DomainError("chisq_sf: x must be nonnegative");
  const double a = 0.5 * static_cast<double>(df);
  const double xx = 0.5 * x;
  if (xx == 0.0) return 1.0;
  if (xx < a + 1.0) return 1.0 - gamma_p_series(a, xx);
  return gamma_q_contfrac(a, xx);
}

double chisq_cdf(double x, int df) {
  if (df <= 0) throw DomainError("chisq_cdf: df must be positive");
  if (x < 0.0) throw DomainError("chisq_cdf: x must be nonnegative");
  const double a = 0.5 * static_cast<double>(df);
  const double xx = 0.5 * x;
  if (xx == 0.0) return 0.0;
  if (xx < a + 1.0) return gamma_p_series(a, xx);
  return 1.0 - gamma_q_contfrac(a, xx);
}

Vector mvn_sample(const Matrix& chol_lower, Rng& rng) {
  if (chol_lower.rows() != chol_lower.cols())
    throw DomainError("mvn_sample: factor not square");
  const std::size_t n = chol_lower.rows();
  Vector z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = rng.normal();
  Vector y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= i; ++j) acc += chol_lower(i, j) * z[j];
    y[i] = acc;
  }
  return y;
}

Vector mvn_sample(const Matrix& chol_lower, RngStream stream) {
  Rng rng(stream);
  return mvn_sample(chol_lower, rng);
}

double canonical_sum(Vector terms) {
  std::sort(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += t;
  return acc;
}

}  // namespace spatfda
