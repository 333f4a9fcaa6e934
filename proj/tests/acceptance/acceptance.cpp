// Acceptance suite: one criterion per invocation (--criterion N), each
// printing PASS/FAIL lines with the measured quantities. Criteria are fixed
// configurations with pinned tolerances; they are not tunable from the
// command line.

#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "spatfda/corr_test.hpp"
#include "spatfda/simstudy.hpp"

using namespace spatfda;

namespace {

constexpr std::uint64_t kAcceptanceSeed = 1729;

struct Checker {
  int criterion = 0;
  bool ok = true;
  std::ostringstream detail;

  void expect(bool condition, const std::string& what) {
    if (!condition) ok = false;
    detail << "  [" << (condition ? "ok" : "FAILED") << "] " << what << "\n";
  }

  int finish(double seconds) {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << criterion << " ("
              << seconds << " s)\n"
              << detail.str();
    return ok ? 0 : 1;
  }
};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

const ErrorRow& find_row(const MeanStudyReport& report, const std::string& method) {
  for (const ErrorRow& row : report.rows)
    if (row.method == method) return row;
  throw std::runtime_error("missing row " + method);
}

const FpcErrorRow& find_row(const FpcStudyReport& report, const std::string& method) {
  for (const FpcErrorRow& row : report.rows)
    if (row.method == method) return row;
  throw std::runtime_error("missing row " + method);
}

const SizePowerRow& find_row(const SizePowerReport& report, const std::string& method,
                             int p, int dep, double rho) {
  for (const SizePowerRow& row : report.rows)
    if (row.method == method && row.p == p && row.dep_index == dep &&
        std::fabs(row.rho_dep - rho) < 1e-12)
      return row;
  throw std::runtime_error("missing size/power row");
}

// --------------------------------------------------------------------------
// 1. Mean-study ordering: every spatial method beats the simple average by at
//    least two pooled standard errors.
// --------------------------------------------------------------------------
int criterion_mean_ordering(Checker& check) {
  MeanStudyConfig config;
  config.n = 100;
  config.reps = 200;
  config.mean_kind = MeanKind::Sqrt;
  config.cov_kind = CovKind::Exponential;
  config.estimator = VarioEstimator::MT;
  config.seed = kAcceptanceSeed;
  const MeanStudyReport report = run_mean_study(config);

  const ErrorRow& simple = find_row(report, "simple");
  check.expect(simple.reps_used >= 190, "simple average completed on >= 190 replications");
  for (const std::string method : {"m1a", "m1b", "m2", "m3"}) {
    const ErrorRow& row = find_row(report, method);
    const double pooled = std::sqrt(row.se_l * row.se_l + simple.se_l * simple.se_l);
    const double gap = simple.mean_l - row.mean_l;
    check.expect(row.reps_used >= 190, method + " completed on >= 190 replications");
    check.expect(gap > 0.0, method + " mean L " + fmt(row.mean_l) + " below simple " +
                                fmt(simple.mean_l));
    check.expect(gap >= 2.0 * pooled, method + " separation " + fmt(gap) + " >= 2 * pooled SE " +
                                          fmt(2.0 * pooled));
  }
  return 0;
}

// --------------------------------------------------------------------------
// 2. FPC-study ordering: CM2 and CM3 beat the standard estimator on the first
//    component; the two are comparable to each other.
// --------------------------------------------------------------------------
int criterion_fpc_ordering(Checker& check) {
  FpcStudyConfig config;
  config.n = 100;
  config.reps = 200;
  config.cov_kind = CovKind::Exponential;
  config.estimator = VarioEstimator::CH;
  config.seed = kAcceptanceSeed;
  const FpcStudyReport report = run_fpc_study(config);

  const FpcErrorRow& standard = find_row(report, "standard");
  const FpcErrorRow& cm2 = find_row(report, "cm2");
  const FpcErrorRow& cm3 = find_row(report, "cm3");
  for (const FpcErrorRow* row : {&standard, &cm2, &cm3})
    check.expect(row->reps_used >= 190, row->method + " completed on >= 190 replications");

  for (const FpcErrorRow* row : {&cm2, &cm3}) {
    const double pooled =
        std::sqrt(row->se_l_v1 * row->se_l_v1 + standard.se_l_v1 * standard.se_l_v1);
    const double gap = standard.mean_l_v1 - row->mean_l_v1;
    check.expect(gap >= 2.0 * pooled, row->method + " v1 error " + fmt(row->mean_l_v1) +
                                          " beats standard " + fmt(standard.mean_l_v1) +
                                          " by " + fmt(gap) + " >= " + fmt(2.0 * pooled));
  }
  const double pooled_cm =
      std::sqrt(cm2.se_l_v1 * cm2.se_l_v1 + cm3.se_l_v1 * cm3.se_l_v1);
  const double diff = std::fabs(cm2.mean_l_v1 - cm3.mean_l_v1);
  check.expect(diff < 2.0 * pooled_cm, "CM2 and CM3 comparable: |" + fmt(cm2.mean_l_v1) +
                                           " - " + fmt(cm3.mean_l_v1) + "| = " + fmt(diff) +
                                           " < " + fmt(2.0 * pooled_cm));
  return 0;
}

// --------------------------------------------------------------------------
// 3. Size behavior of the chi-squared test under the null.
// --------------------------------------------------------------------------
int criterion_size(Checker& check) {
  SizePowerConfig config;
  config.mode = SizePowerConfig::Mode::Size;
  config.n = 32;
  config.runs = 2000;
  config.mc_reps = 10000;
  config.p_max = 4;
  config.seed = kAcceptanceSeed;
  const SizePowerReport at32 = run_size_power_study(config);

  const SizePowerRow& s1 = find_row(at32, "S", 1, 0, 0.0);
  const SizePowerRow& s4 = find_row(at32, "S", 4, 0, 0.0);
  check.expect(s4.runs_used >= 1900, "N=32 study completed on >= 1900 runs");
  check.expect(s4.rate > 0.05, "N=32 empirical size at p=4 is " + fmt(s4.rate) +
                                   " > nominal 0.05");
  check.expect(s4.rate > s1.rate, "size increases with p: size(4) = " + fmt(s4.rate) +
                                      " > size(1) = " + fmt(s1.rate));
  const SizePowerRow& sm4 = find_row(at32, "SM", 4, 0, 0.0);
  check.detail << "  [info] N=32 SM size at p=4: " << fmt(sm4.rate) << "\n";

  config.n = 100;
  const SizePowerReport at100 = run_size_power_study(config);
  for (int p = 1; p <= 4; ++p) {
    const SizePowerRow& row = find_row(at100, "S", p, 0, 0.0);
    check.expect(row.rate >= 0.03 && row.rate <= 0.12,
                 "N=100 size at p=" + std::to_string(p) + " is " + fmt(row.rate) +
                     " within [0.03, 0.12]");
  }
  return 0;
}

// --------------------------------------------------------------------------
// 4. Power monotonicity of the SM test and agreement across the four
//    dependence scenarios.
// --------------------------------------------------------------------------
int criterion_power(Checker& check) {
  SizePowerConfig config;
  config.mode = SizePowerConfig::Mode::Power;
  config.n = 100;
  config.runs = 1000;
  config.mc_reps = 10000;
  // p = 5 keeps the tested subspace clear of the near-tied eigenvalue
  // triple (2.74, 2.66, 2.63): cutting inside it makes power depend on which
  // mixture branch the component estimator happens to keep. Evenly spread
  // stations keep the dependence construction's rotation alignment high.
  config.p_fixed = 5;
  config.rho_grid = {0.0, 0.25, 0.5, 0.75, 0.9};
  config.dep_indices = {1, 2, 3, 4};
  config.layout.layout = Layout::UniformSphere;
  config.run_s = false;
  config.run_t = false;
  config.seed = kAcceptanceSeed;
  const SizePowerReport report = run_size_power_study(config);

  for (int dep : config.dep_indices) {
    double prev_rate = -1.0, prev_se = 0.0;
    for (double rho : config.rho_grid) {
      const SizePowerRow& row = find_row(report, "SM", config.p_fixed, dep, rho);
      check.expect(row.runs_used >= 950, "dep " + std::to_string(dep) + " rho " + fmt(rho) +
                                             " completed on >= 950 runs");
      if (prev_rate >= 0.0) {
        const double slack = 2.0 * std::sqrt(row.mc_se * row.mc_se + prev_se * prev_se);
        check.expect(row.rate >= prev_rate - slack,
                     "dep " + std::to_string(dep) + ": power(" + fmt(rho) + ") = " +
                         fmt(row.rate) + " >= " + fmt(prev_rate) + " - " + fmt(slack));
      }
      prev_rate = row.rate;
      prev_se = row.mc_se;
    }
    const SizePowerRow& top = find_row(report, "SM", config.p_fixed, dep, 0.9);
    check.expect(top.rate >= 0.8, "dep " + std::to_string(dep) + " power at rho 0.9 is " +
                                      fmt(top.rate) + " >= 0.8");
  }

  for (double rho : config.rho_grid) {
    for (std::size_t i = 0; i < config.dep_indices.size(); ++i) {
      for (std::size_t j = i + 1; j < config.dep_indices.size(); ++j) {
        const SizePowerRow& a =
            find_row(report, "SM", config.p_fixed, config.dep_indices[i], rho);
        const SizePowerRow& b =
            find_row(report, "SM", config.p_fixed, config.dep_indices[j], rho);
        const double pooled = std::sqrt(a.mc_se * a.mc_se + b.mc_se * b.mc_se);
        const double diff = std::fabs(a.rate - b.rate);
        check.expect(diff <= 3.0 * pooled,
                     "curves agree at rho " + fmt(rho) + ": |" + fmt(a.rate) + " - " +
                         fmt(b.rate) + "| <= " + fmt(3.0 * pooled));
      }
    }
  }
  return 0;
}

// --------------------------------------------------------------------------
// 5. Oracle equivalences.
// --------------------------------------------------------------------------
int criterion_oracles(Checker& check) {
  const Grid grid(336);
  Rng rng(RngStream{kAcceptanceSeed, 500});
  const LocationSet locs = sample_locations(20, Layout::Clustered, rng);

  // (a) CM3 with all fits forced Flat equals the standard estimator.
  {
    const BasisSet basis = fourier_basis(grid, 11);
    std::vector<Curve> curves;
    for (int k = 0; k < 20; ++k) {
      Vector coeffs(11);
      for (double& c : coeffs) c = rng.normal();
      curves.push_back(synthesize(basis, coeffs));
    }
    const CurveSet data(std::move(curves), locs);
    const FpcSet std_fpcs = standard_fpc(data, 11, 3);
    const FpcSet cm3 = estimate_fpc_cm3(data, 11, 3, VarioEstimator::MT,
                                        CovKind::Exponential, FpcWeighting::ForceFlat);
    double max_err = 0.0;
    for (std::size_t j = 0; j < std_fpcs.components.size(); ++j) {
      max_err = std::max(max_err, std::fabs(cm3.eigenvalues[j] - std_fpcs.eigenvalues[j]));
      max_err = std::max(max_err, l1_distance(cm3.components[j], std_fpcs.components[j]));
    }
    check.expect(max_err <= 1e-10,
                 "CM3 forced-Flat equals standard estimator (max err " + fmt(max_err) + ")");
  }

  // (b) Hilbert-Schmidt closed form equals the truncated basis expansion.
  {
    const BasisSet basis = fourier_basis(grid, 73);
    Vector ca(73, 0.0), cb(73, 0.0);
    for (int j = 0; j < 15; ++j) {
      ca[j] = rng.normal();
      cb[j] = rng.normal();
    }
    const Curve xa = synthesize(basis, ca);
    const Curve xb = synthesize(basis, cb);
    const CurveSet pair(std::vector<Curve>{xa, xb},
                        LocationSet({locs[0], locs[1]}));
    const double closed = hs_cloud(pair).pairs[0].dissim;
    double expansion = 0.0;
    for (int i = 0; i < 73; ++i) {
      const double fia = inner_product(xa, basis.function(i));
      const double fib = inner_product(xb, basis.function(i));
      const Curve diff = curve_sub(curve_scale(xa, fia), curve_scale(xb, fib));
      expansion += inner_product(diff, diff);
    }
    const double err = std::fabs(closed * closed - expansion);
    check.expect(err <= 1e-6, "HS closed form equals truncated expansion (err " +
                                  fmt(err) + ")");
  }

  // (c) Optimal weights: KKT residual and the identity-covariance case.
  {
    const Matrix dists = distance_matrix(locs);
    Matrix c(20, 20);
    for (int k = 0; k < 20; ++k)
      for (int l = 0; l < 20; ++l) c(k, l) = std::exp(-dists(k, l) / 0.4);
    const WeightVector w = optimal_weights(SpdMatrix(c));
    double sum = 0.0;
    for (double v : w.w) sum += v;
    Vector kkt(20, 0.0);
    for (int n = 0; n < 20; ++n)
      for (int k = 0; k < 20; ++k) kkt[n] += w.w[k] * c(k, n);
    double kkt_res = 0.0;
    for (int n = 0; n < 20; ++n) kkt_res = std::max(kkt_res, std::fabs(kkt[n] - kkt[0]));
    kkt_res = std::max(kkt_res, std::fabs(sum - 1.0));
    check.expect(kkt_res <= 1e-9, "KKT residual " + fmt(kkt_res) + " <= 1e-9");

    const WeightVector eq = optimal_weights(SpdMatrix(Matrix::identity(20)));
    double id_err = 0.0;
    for (double v : eq.w) id_err = std::max(id_err, std::fabs(v - 0.05));
    check.expect(id_err <= 1e-12, "identity covariance gives 1/N weights");
  }

  // (d) M2 under the Flat fallback equals the sample mean.
  {
    Rng noise(RngStream{kAcceptanceSeed, 501});
    std::vector<Curve> curves;
    for (int k = 0; k < 20; ++k) {
      Curve c = zero_curve(grid);
      for (double& v : c.values) v = noise.normal();
      curves.push_back(std::move(c));
    }
    const CurveSet data(std::move(curves), locs);
    const Curve m2 = estimate_mean_m2(data, VarioEstimator::MT, CovKind::Exponential);
    const double err = l1_distance(m2, sample_mean(data));
    check.expect(err <= 1e-12, "M2 Flat fallback equals sample mean (err " + fmt(err) + ")");
  }
  return 0;
}

// --------------------------------------------------------------------------
// 6. Null calibration of the quadratic-form statistic with known components
//    and white unit scores: Kolmogorov-Smirnov against chi^2_2 at level 0.01.
// --------------------------------------------------------------------------
int criterion_null_calibration(Checker& check) {
  const int n = 100, reps = 5000;
  Rng loc_rng(RngStream{kAcceptanceSeed, 600});
  const LocationSet locs = sample_locations(n, Layout::Clustered, loc_rng);
  const Matrix dists = distance_matrix(locs);

  std::vector<double> stats(reps);
  for (int r = 0; r < reps; ++r) {
    Rng rng(RngStream{kAcceptanceSeed, 601 + static_cast<std::uint64_t>(r)});
    Matrix x(n, 2), y(n, 1);
    for (int k = 0; k < n; ++k) {
      x(k, 0) = rng.normal();
      x(k, 1) = rng.normal();
      y(k, 0) = rng.normal();
    }
    const ScoreField xf{x, locs};
    const ScoreField yf{y, locs};
    const std::vector<ScoreModel> xm =
        fit_score_models(xf, VarioEstimator::MT, ModelSelect::ForceFlat);
    const std::vector<ScoreModel> ym =
        fit_score_models(yf, VarioEstimator::MT, ModelSelect::ForceFlat);
    stats[r] = test_s(cross_cov(xf, yf), covariance_tensor(xm, ym, dists)).statistic;
  }

  std::sort(stats.begin(), stats.end());
  double d = 0.0;
  for (int r = 0; r < reps; ++r) {
    const double f = chisq_cdf(stats[r], 2);
    d = std::max(d, std::fabs(f - static_cast<double>(r + 1) / reps));
    d = std::max(d, std::fabs(f - static_cast<double>(r) / reps));
  }
  const double threshold = 1.6276 / std::sqrt(static_cast<double>(reps));
  check.expect(d <= threshold, "KS distance " + fmt(d) + " <= " + fmt(threshold) +
                                   " (level 0.01 against chi^2_2)");
  return 0;
}

// --------------------------------------------------------------------------
// 7. The documentation states which published results are out of scope.
// --------------------------------------------------------------------------
int criterion_docs(Checker& check) {
  const std::string readme_path = std::string(SPATFDA_SOURCE_DIR) + "/README.md";
  std::ifstream in(readme_path);
  check.expect(static_cast<bool>(in), "README.md exists");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  check.expect(text.find("## Data availability") != std::string::npos,
               "README has a data-availability section");
  check.expect(text.find("synthetic") != std::string::npos,
               "README states that the shipped studies are synthetic");
  check.expect(text.find("not included") != std::string::npos ||
                   text.find("not bundled") != std::string::npos,
               "README states that the source observations are not bundled");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  int criterion = 0;
  for (int i = 1; i + 1 < argc + 1; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
      criterion = std::atoi(argv[i + 1]);
  }
  if (criterion < 1 || criterion > 7) {
    std::cerr << "usage: acceptance_tests --criterion N (1..7)\n";
    return 2;
  }

  Checker check;
  check.criterion = criterion;
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (criterion) {
      case 1: criterion_mean_ordering(check); break;
      case 2: criterion_fpc_ordering(check); break;
      case 3: criterion_size(check); break;
      case 4: criterion_power(check); break;
      case 5: criterion_oracles(check); break;
      case 6: criterion_null_calibration(check); break;
      case 7: criterion_docs(check); break;
    }
  } catch (const std::exception& e) {
    check.expect(false, std::string("exception: ") + e.what());
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return check.finish(seconds);
}
