#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spatfda/simstudy.hpp"
#include "spatfda/spatial_mean.hpp"

using namespace spatfda;

namespace {

constexpr double kPi = std::numbers::pi;

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

LocationSet spread_locations(int n, std::uint64_t seed) {
  Rng rng(RngStream{seed, 0});
  return sample_locations(n, Layout::Clustered, rng);
}

CurveSet iid_noise_curves(int n, const Grid& grid, std::uint64_t seed) {
  Rng rng(RngStream{seed, 1});
  const LocationSet locs = spread_locations(n, seed);
  std::vector<Curve> curves;
  for (int k = 0; k < n; ++k) {
    Curve c = zero_curve(grid);
    const double level = rng.normal();
    for (double& v : c.values) v = level;
    curves.push_back(std::move(c));
  }
  return CurveSet(std::move(curves), locs);
}

}  // namespace

TEST_CASE("optimal_weights equals 1/N on the identity") {
  const WeightVector w = optimal_weights(SpdMatrix(Matrix::identity(5)));
  for (double v : w.w) CHECK(v == doctest::Approx(0.2).epsilon(1e-13));
}

TEST_CASE("optimal_weights on exchangeable and diagonal covariances") {
  const WeightVector sym = optimal_weights(SpdMatrix(from_rows({{1.0, 0.7}, {0.7, 1.0}})));
  CHECK(sym.w[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sym.w[1] == doctest::Approx(0.5).epsilon(1e-12));

  const WeightVector diag = optimal_weights(SpdMatrix(from_rows({{1.0, 0.0}, {0.0, 4.0}})));
  CHECK(diag.w[0] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(diag.w[1] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("optimal_weights satisfies the stationarity system") {
  Rng rng(RngStream{3, 3});
  const LocationSet locs = spread_locations(30, 5);
  const Matrix dists = distance_matrix(locs);
  Matrix c(30, 30);
  for (int k = 0; k < 30; ++k)
    for (int l = 0; l < 30; ++l) c(k, l) = std::exp(-dists(k, l) / 0.5);
  const WeightVector w = optimal_weights(SpdMatrix(c));

  double sum = 0.0;
  for (double v : w.w) sum += v;
  CHECK(std::fabs(sum - 1.0) <= 1e-10);

  // sum_k w_k C_{kn} must be constant across n (the Lagrange multiplier)
  Vector r(30, 0.0);
  for (int n = 0; n < 30; ++n)
    for (int k = 0; k < 30; ++k) r[n] += w.w[k] * c(k, n);
  double rmax = 0.0;
  for (int n = 0; n < 30; ++n) rmax = std::max(rmax, std::fabs(r[n] - r[0]));
  CHECK(rmax <= 1e-9);
}

TEST_CASE("optimal_weights invariant under covariance rescaling") {
  const Matrix base = from_rows({{1.0, 0.3, 0.1}, {0.3, 1.0, 0.2}, {0.1, 0.2, 1.0}});
  Matrix scaled = base;
  for (double& v : scaled.data()) v *= 7.5;
  const WeightVector w1 = optimal_weights(SpdMatrix(base));
  const WeightVector w2 = optimal_weights(SpdMatrix(scaled));
  for (int k = 0; k < 3; ++k) CHECK(w1.w[k] == doctest::Approx(w2.w[k]).epsilon(1e-12));
}

TEST_CASE("sample_mean basics") {
  const Grid grid(50);
  const LocationSet locs({make_location(0.0, 0.0), make_location(0.1, 0.4)});
  const Curve f = make_curve(grid, [](double t) { return std::sin(2.0 * kPi * t); });
  const CurveSet single(std::vector<Curve>{f}, LocationSet({make_location(0.0, 0.0)}));
  CHECK(l1_distance(sample_mean(single), f) == 0.0);

  const CurveSet pm(std::vector<Curve>{f, curve_scale(f, -1.0)}, locs);
  CHECK(l1_distance(sample_mean(pm), zero_curve(grid)) == 0.0);
}

TEST_CASE("estimators return the single curve at N = 1") {
  const Grid grid(64);
  const Curve f = make_curve(grid, [](double t) { return t * t; });
  const CurveSet single(std::vector<Curve>{f}, LocationSet({make_location(0.2, 0.3)}));
  CHECK(l1_distance(estimate_mean_m1(single, M1Variant::A, VarioEstimator::MT,
                                     CovKind::Exponential),
                    f) == 0.0);
  CHECK(l1_distance(estimate_mean_m2(single, VarioEstimator::MT, CovKind::Exponential), f) ==
        0.0);
}

TEST_CASE("every estimator is exact on noiseless data") {
  const Grid grid(336);
  const Curve mu = make_curve(grid, [](double t) { return std::sqrt(t) * std::sin(6.0 * kPi * t); });
  const LocationSet locs = spread_locations(12, 11);
  std::vector<Curve> curves(12, mu);
  const CurveSet data(std::move(curves), locs);

  // per-point variograms are identically zero, so M1 has nothing to fit
  CHECK_THROWS_AS(estimate_mean_m1(data, M1Variant::A, VarioEstimator::MT,
                                   CovKind::Exponential),
                  AllFitsFailed);
  CHECK(l1_distance(estimate_mean_m2(data, VarioEstimator::MT, CovKind::Exponential), mu) <=
        1e-10);
  // M3 reproduces the basis truncation of the mean exactly
  const BasisSet basis = fourier_basis(grid, default_basis_size(grid.size()));
  const Curve truncated = synthesize(basis, project_coeffs(mu, basis));
  CHECK(l1_distance(estimate_mean_m3(data, 0, VarioEstimator::MT, CovKind::Exponential),
                    truncated) <= 1e-10);
  CHECK(l1_distance(sample_mean(data), mu) <= 1e-10);
}

TEST_CASE("M3 is exact on noiseless in-span data") {
  const Grid grid(336);
  const Curve mu =
      make_curve(grid, [](double t) { return 2.0 * std::numbers::sqrt2 * std::sin(6.0 * kPi * t); });
  const LocationSet locs = spread_locations(12, 13);
  std::vector<Curve> curves(12, mu);
  const CurveSet data(std::move(curves), locs);
  CHECK(l1_distance(estimate_mean_m3(data, 0, VarioEstimator::MT, CovKind::Exponential), mu) <=
        1e-10);
}

TEST_CASE("estimators are translation equivariant") {
  Rng rng(RngStream{17, 0});
  const LocationSet locs = spread_locations(25, 17);
  MeanDgpSpec spec;
  spec.grid_m = 120;
  const CurveSet data = gen_mean_dgp(spec, locs, rng);
  const Grid grid(120);
  const Curve shift = make_curve(grid, [](double t) { return 3.0 - 2.0 * t; });

  std::vector<Curve> shifted;
  for (int k = 0; k < data.size(); ++k) shifted.push_back(curve_add(data.curve(k), shift));
  const CurveSet data_shift(std::move(shifted), locs);

  const Curve m2 = estimate_mean_m2(data, VarioEstimator::MT, CovKind::Exponential);
  const Curve m2s = estimate_mean_m2(data_shift, VarioEstimator::MT, CovKind::Exponential);
  CHECK(l1_distance(m2s, curve_add(m2, shift)) <= 1e-9);

  const Curve m1 = estimate_mean_m1(data, M1Variant::B, VarioEstimator::MT, CovKind::Exponential);
  const Curve m1s =
      estimate_mean_m1(data_shift, M1Variant::B, VarioEstimator::MT, CovKind::Exponential);
  CHECK(l1_distance(m1s, curve_add(m1, shift)) <= 1e-9);
}

TEST_CASE("M2 equals the sample mean under the Flat fallback") {
  // Exchangeable design with a perfectly flat functional variogram: all
  // pairwise L2 distances equal sqrt(2), so the Flat fallback is certain.
  const Grid grid(96);
  const BasisSet basis = fourier_basis(grid, 21);
  std::vector<Curve> curves;
  for (int k = 0; k < 20; ++k) curves.push_back(basis.function(k));
  const CurveSet data(std::move(curves), spread_locations(20, 23));
  const Curve m2 = estimate_mean_m2(data, VarioEstimator::MT, CovKind::Exponential);
  CHECK(l1_distance(m2, sample_mean(data)) <= 1e-12);
}

TEST_CASE("iid curves fall back to the simple average in most draws") {
  // Spatially white fields occasionally produce noise shapes a parametric
  // model can chase; the fallback must dominate, and whenever it fires the
  // estimators reduce exactly to their equal-weight forms.
  const Grid grid(96);
  const int K = default_basis_size(96);
  const BasisSet basis = fourier_basis(grid, K);
  int m2_flat = 0, m3_flat = 0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    const CurveSet data = iid_noise_curves(30, grid, 1000 + s);
    const Curve m2 = estimate_mean_m2(data, VarioEstimator::MT, CovKind::Exponential);
    if (l1_distance(m2, sample_mean(data)) <= 1e-12) ++m2_flat;
    const Curve m3 = estimate_mean_m3(data, K, VarioEstimator::MT, CovKind::Exponential);
    const Curve truncated = synthesize(basis, project_coeffs(sample_mean(data), basis));
    if (l1_distance(m3, truncated) <= 1e-10) ++m3_flat;
  }
  CHECK(m2_flat >= (3 * seeds) / 4);
  CHECK(m3_flat >= (3 * seeds) / 4);
}

TEST_CASE("M1 both variants run on structured data and mark successes") {
  Rng rng(RngStream{31, 0});
  const LocationSet locs = spread_locations(40, 31);
  MeanDgpSpec spec;
  spec.grid_m = 60;  // small grid keeps the per-point fits quick
  const CurveSet data = gen_mean_dgp(spec, locs, rng);
  const M1Pair pair = estimate_mean_m1_both(data, VarioEstimator::MT, CovKind::Exponential);
  CHECK(pair.diagnostics.success_fraction > 0.3);
  CHECK(l1_distance(pair.variant_a, pair.variant_b) < 1.0);
}

TEST_CASE("spatial_scalar_mean reduces to the average for flat fields") {
  const LocationSet locs = spread_locations(20, 41);
  const Matrix dists = distance_matrix(locs);
  const PairOrder order(dists);
  Rng rng(RngStream{41, 7});
  Vector values(20);
  double mean = 0.0;
  for (double& v : values) {
    v = rng.normal();
    mean += v;
  }
  mean /= 20;
  ScalarMeanOptions options;
  options.force_flat = true;
  const ScalarMeanResult res = spatial_scalar_mean(values, order, dists, options);
  CHECK_FALSE(res.structured);
  CHECK(res.mean == doctest::Approx(mean).epsilon(1e-14));
}
