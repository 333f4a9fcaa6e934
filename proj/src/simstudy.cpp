#include "spatfda/simstudy.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

namespace spatfda {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kPi = std::numbers::pi;

std::uint64_t stream_id(std::uint64_t tag, std::uint64_t a, std::uint64_t b) {
  return (tag << 56) | ((a & 0xFFFFFFULL) << 32) | (b & 0xFFFFFFFFULL);
}

constexpr std::uint64_t kTagLocations = 1;
constexpr std::uint64_t kTagMeanRep = 2;
constexpr std::uint64_t kTagFpcRep = 3;
constexpr std::uint64_t kTagTestRun = 4;
constexpr std::uint64_t kTagSm = 6;
constexpr std::uint64_t kTagT = 7;

}  // namespace

GrfSampler::GrfSampler(const CovModel& model, const LocationSet& locs) {
  const int n = locs.size();
  Matrix cov(n, n, 0.0);
  double trace = 0.0;
  for (int k = 0; k < n; ++k) {
    cov(k, k) = cov_eval(model, 0.0);
    trace += cov(k, k);
    for (int l = k + 1; l < n; ++l) {
      const double v = cov_eval(model, chordal_distance(locs[k], locs[l]));
      cov(k, l) = v;
      cov(l, k) = v;
    }
  }
  if (trace <= 0.0) {
    factor_ = Matrix(n, n, 0.0);  // degenerate zero-variance field
  } else {
    factor_ = cholesky_factor(SpdMatrix(std::move(cov))).lower;
  }
}

Vector GrfSampler::sample(Rng& rng) const { return mvn_sample(factor_, rng); }

Vector GrfSampler::rotate(const Vector& z) const {
  const std::size_t n = factor_.rows();
  if (z.size() != n) throw LengthMismatch("GrfSampler::rotate: size mismatch");
  Vector y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= i; ++j) acc += factor_(i, j) * z[j];
    y[i] = acc;
  }
  return y;
}

Vector gen_grf_scores(const CovModel& model, const LocationSet& locs, Rng& rng) {
  return GrfSampler(model, locs).sample(rng);
}

Curve mean_dgp_mean_curve(MeanKind kind, const Grid& grid) {
  switch (kind) {
    case MeanKind::Fourier:
      return make_curve(grid, [](double t) { return 2.0 * kSqrt2 * std::sin(6.0 * kPi * t); });
    case MeanKind::Sqrt:
      return make_curve(grid, [](double t) { return std::sqrt(t) * std::sin(6.0 * kPi * t); });
    case MeanKind::None:
      return zero_curve(grid);
  }
  throw ConfigError("unknown mean kind");
}

namespace {

CovModel score_model(CovKind kind, double sigma, double rho) {
  if (sigma == 0.0) return CovModel{CovKind::Flat, 0.0, 0.0, 0.0};
  return CovModel{kind, 0.0, sigma * sigma, rho};
}

CurveSet assemble(const Grid& grid, const LocationSet& locs, const Curve& mean,
                  const std::vector<const Curve*>& components,
                  const std::vector<const Vector*>& scores) {
  const int n = locs.size();
  const int m = grid.size();
  std::vector<Curve> curves;
  curves.reserve(n);
  for (int k = 0; k < n; ++k) {
    Curve c = mean;
    for (std::size_t i = 0; i < components.size(); ++i) {
      const double s = (*scores[i])[k];
      const Vector& comp = components[i]->values;
      for (int j = 0; j < m; ++j) c.values[j] += s * comp[j];
    }
    curves.push_back(std::move(c));
  }
  return CurveSet(std::move(curves), locs);
}

}  // namespace

CurveSet gen_mean_dgp(const MeanDgpSpec& spec, const LocationSet& locs, Rng& rng) {
  const Grid grid(spec.grid_m);
  const Curve mu = mean_dgp_mean_curve(spec.mean_kind, grid);
  const Curve e1 = make_curve(grid, [](double t) { return kSqrt2 * std::sin(12.0 * kPi * t); });
  const Curve e2 = make_curve(grid, [](double t) { return kSqrt2 * std::sin(kPi * t); });

  const Vector xi1 = gen_grf_scores(score_model(spec.cov_kind, spec.sigma1, spec.rho1), locs, rng);
  const Vector xi2 = gen_grf_scores(score_model(spec.cov_kind, spec.sigma2, spec.rho2), locs, rng);
  return assemble(grid, locs, mu, {&e1, &e2}, {&xi1, &xi2});
}

FpcPopulation fpc_dgp_population(const Grid& grid) {
  const Curve e1 = make_curve(grid, [](double t) { return kSqrt2 * std::sin(14.0 * kPi * t); });
  const Curve e2 = make_curve(grid, [](double t) { return kSqrt2 * std::sin(4.0 * kPi * t); });
  FpcPopulation pop{curve_scale(curve_add(e1, e2), 1.0 / kSqrt2),
                    make_curve(grid, [](double t) { return kSqrt2 * std::sin(9.0 * kPi * t); })};
  return pop;
}

CurveSet gen_fpc_dgp(const FpcDgpSpec& spec, const LocationSet& locs, Rng& rng) {
  const Grid grid(spec.grid_m);
  const FpcPopulation pop = fpc_dgp_population(grid);
  const Vector xi1 = gen_grf_scores(score_model(spec.cov_kind, spec.sigma1, spec.rho1), locs, rng);
  const Vector xi2 = gen_grf_scores(score_model(spec.cov_kind, spec.sigma2, spec.rho2), locs, rng);
  return assemble(grid, locs, zero_curve(grid), {&pop.v1, &pop.v2}, {&xi1, &xi2});
}

std::vector<CovModel> default_xi_models() {
  return {
      CovModel{CovKind::Gaussian, 0.0, 20.05, 0.12},    // xi_1
      CovModel{CovKind::Flat, 0.0, 3.30, 0.0},          // xi_2
      CovModel{CovKind::Exponential, 0.0, 2.63, 0.16},  // xi_3
      CovModel{CovKind::Gaussian, 0.0, 2.66, 0.18},     // xi_4
      CovModel{CovKind::Flat, 0.0, 2.74, 0.0},          // xi_5
      CovModel{CovKind::Gaussian, 0.16, 0.85, 0.17},    // xi_6
      CovModel{CovKind::Flat, 0.0, 1.22, 0.0},          // xi_7
  };
}

CovModel default_eta_model() { return CovModel{CovKind::Gaussian, 0.0, 5.99, 0.32}; }

TestDgpSpec default_test_dgp_spec() {
  TestDgpSpec spec;
  spec.xi_models = default_xi_models();
  spec.eta_model = default_eta_model();
  return spec;
}

std::vector<Curve> default_x_components(const Grid& grid) {
  std::vector<Curve> v;
  for (int i = 1; i <= 7; ++i) {
    v.push_back(make_curve(grid, [i](double t) { return kSqrt2 * std::sin(2.0 * kPi * i * t); }));
  }
  return v;
}

Curve default_y_component(const Grid& grid) {
  return make_curve(grid, [](double t) { return std::sqrt(3.0) * (2.0 * t - 1.0); });
}

TestDgpSampler::TestDgpSampler(const TestDgpSpec& spec, const LocationSet& locs,
                               std::vector<Curve> x_components, Curve y_component)
    : spec_(spec),
      locs_(locs),
      x_components_(std::move(x_components)),
      y_component_(std::move(y_component)),
      eta_sampler_(spec.eta_model, locs) {
  if (spec_.xi_models.size() != x_components_.size())
    throw ConfigError("TestDgpSampler: one component curve per xi model required");
  if (spec_.rho_dep < 0.0 || spec_.rho_dep >= 1.0)
    throw ConfigError("TestDgpSampler: rho_dep must lie in [0, 1)");
  if (spec_.rho_dep > 0.0 &&
      (spec_.dep_index < 1 || spec_.dep_index > static_cast<int>(spec_.xi_models.size())))
    throw ConfigError("TestDgpSampler: dep_index out of range");
  xi_samplers_.reserve(spec_.xi_models.size());
  for (const CovModel& m : spec_.xi_models) xi_samplers_.emplace_back(m, locs);
}

TestDgpSampler::RawScores TestDgpSampler::sample_scores(Rng& rng) const {
  const int n = locs_.size();
  const std::size_t nf = xi_samplers_.size();
  RawScores out;
  out.xi.resize(nf);

  // Standard vectors first, then the dependence rotation: the standard pair
  // behind (xi_dep, eta) is correlated before each field's Cholesky factor is
  // applied.
  std::vector<Vector> z(nf, Vector(n));
  for (std::size_t i = 0; i < nf; ++i)
    for (int k = 0; k < n; ++k) z[i][k] = rng.normal();
  Vector z_eta(n);
  for (int k = 0; k < n; ++k) z_eta[k] = rng.normal();

  if (spec_.rho_dep > 0.0) {
    const Vector& y1 = z[spec_.dep_index - 1];
    const double rho = spec_.rho_dep;
    const double tail = std::sqrt(1.0 - rho * rho);
    for (int k = 0; k < n; ++k) z_eta[k] = rho * y1[k] + tail * z_eta[k];
  }

  for (std::size_t i = 0; i < nf; ++i) out.xi[i] = xi_samplers_[i].rotate(z[i]);
  out.eta = eta_sampler_.rotate(z_eta);
  return out;
}

PairedCurveSets TestDgpSampler::sample(Rng& rng) const {
  const RawScores raw = sample_scores(rng);
  const Grid grid(spec_.grid_m);

  std::vector<const Curve*> comps;
  std::vector<const Vector*> scores;
  for (std::size_t i = 0; i < x_components_.size(); ++i) {
    comps.push_back(&x_components_[i]);
    scores.push_back(&raw.xi[i]);
  }
  CurveSet x = assemble(grid, locs_, zero_curve(grid), comps, scores);
  CurveSet y = assemble(grid, locs_, zero_curve(grid), {&y_component_}, {&raw.eta});
  return PairedCurveSets{std::move(x), std::move(y)};
}

PairedCurveSets gen_test_dgp(const TestDgpSpec& spec, const LocationSet& locs,
                             const std::vector<Curve>& x_components,
                             const Curve& y_component, Rng& rng) {
  return TestDgpSampler(spec, locs, x_components, y_component).sample(rng);
}

double l_error(const Curve& estimate, const Curve& truth) {
  return l1_distance(estimate, truth);
}

double aligned_l_error(const Curve& estimate, const Curve& truth) {
  if (inner_product(estimate, truth) < 0.0)
    return l1_distance(curve_scale(estimate, -1.0), truth);
  return l1_distance(estimate, truth);
}

LocationSet study_locations(const LayoutChoice& layout, int n, std::uint64_t seed) {
  if (!layout.locations_file.empty()) return read_locations_csv(layout.locations_file);
  Rng rng(RngStream{seed, stream_id(kTagLocations, 0, 0)});
  return sample_locations(n, layout.layout, rng);
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        body(i);
      }
    });
  }
  for (std::thread& t : pool) t.join();
}

// ---------------------------------------------------------------------------
// Mean study
// ---------------------------------------------------------------------------

namespace {

struct RunningStats {
  int used = 0;
  int failures = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double value) {
    ++used;
    sum += value;
    sum_sq += value * value;
  }

  ErrorRow row(const std::string& method) const {
    ErrorRow r;
    r.method = method;
    r.reps_used = used;
    r.failures = failures;
    if (used > 0) {
      r.mean_l = sum / used;
      const double var = std::max(0.0, sum_sq / used - r.mean_l * r.mean_l);
      r.se_l = used > 1 ? std::sqrt(var / used) : 0.0;
    }
    return r;
  }
};

}  // namespace

MeanStudyReport run_mean_study(const MeanStudyConfig& config) {
  if (config.reps < 1) throw ConfigError("run_mean_study: reps must be positive");
  if (config.n < 1) throw ConfigError("run_mean_study: n must be positive");

  const LocationSet locs = study_locations(config.layout, config.n, config.seed);
  MeanDgpSpec spec;
  spec.mean_kind = config.mean_kind;
  spec.cov_kind = config.cov_kind;
  spec.grid_m = config.grid_m;

  const Grid grid(config.grid_m);
  const Curve truth = mean_dgp_mean_curve(config.mean_kind, grid);

  // Covariance factors are fixed across replications.
  const GrfSampler xi1(score_model(spec.cov_kind, spec.sigma1, spec.rho1), locs);
  const GrfSampler xi2(score_model(spec.cov_kind, spec.sigma2, spec.rho2), locs);
  const Curve e1 = make_curve(grid, [](double t) { return kSqrt2 * std::sin(12.0 * kPi * t); });
  const Curve e2 = make_curve(grid, [](double t) { return kSqrt2 * std::sin(kPi * t); });
  const Curve mu = mean_dgp_mean_curve(config.mean_kind, grid);

  constexpr int kMethods = 5;  // m1a m1b m2 m3 simple
  const int reps = config.reps;
  std::vector<std::array<double, kMethods>> losses(reps);
  std::vector<std::array<char, kMethods>> ok(reps);
  std::vector<double> success_fraction(reps, 0.0);

  parallel_for(reps, config.threads, [&](int r) {
    Rng rng(RngStream{config.seed, stream_id(kTagMeanRep, 0, static_cast<std::uint64_t>(r))});
    const Vector s1 = xi1.sample(rng);
    const Vector s2 = xi2.sample(rng);
    const CurveSet data = assemble(grid, locs, mu, {&e1, &e2}, {&s1, &s2});

    auto& loss = losses[r];
    auto& flag = ok[r];
    flag.fill(0);
    try {
      const M1Pair m1 = estimate_mean_m1_both(data, config.estimator, config.cov_kind);
      loss[0] = l_error(m1.variant_a, truth);
      loss[1] = l_error(m1.variant_b, truth);
      flag[0] = flag[1] = 1;
      success_fraction[r] = m1.diagnostics.success_fraction;
    } catch (const Error&) {
    }
    try {
      loss[2] = l_error(estimate_mean_m2(data, config.estimator, config.cov_kind), truth);
      flag[2] = 1;
    } catch (const Error&) {
    }
    try {
      loss[3] = l_error(estimate_mean_m3(data, config.K, config.estimator, config.cov_kind),
                        truth);
      flag[3] = 1;
    } catch (const Error&) {
    }
    loss[4] = l_error(sample_mean(data), truth);
    flag[4] = 1;
  });

  const char* names[kMethods] = {"m1a", "m1b", "m2", "m3", "simple"};
  std::array<RunningStats, kMethods> stats;
  double success_sum = 0.0;
  int success_count = 0;
  for (int r = 0; r < reps; ++r) {
    for (int m = 0; m < kMethods; ++m) {
      if (ok[r][m]) {
        stats[m].add(losses[r][m]);
      } else {
        ++stats[m].failures;
      }
    }
    if (ok[r][0]) {
      success_sum += success_fraction[r];
      ++success_count;
    }
  }

  MeanStudyReport report;
  report.reps = reps;
  for (int m = 0; m < kMethods; ++m) report.rows.push_back(stats[m].row(names[m]));
  report.m1_success_fraction = success_count > 0 ? success_sum / success_count : 0.0;
  return report;
}

// ---------------------------------------------------------------------------
// FPC study
// ---------------------------------------------------------------------------

FpcStudyReport run_fpc_study(const FpcStudyConfig& config) {
  if (config.reps < 1) throw ConfigError("run_fpc_study: reps must be positive");
  if (config.n < 1) throw ConfigError("run_fpc_study: n must be positive");

  const LocationSet locs = study_locations(config.layout, config.n, config.seed);
  FpcDgpSpec spec;
  spec.cov_kind = config.cov_kind;
  spec.grid_m = config.grid_m;

  const Grid grid(config.grid_m);
  const FpcPopulation pop = fpc_dgp_population(grid);
  const GrfSampler xi1(score_model(spec.cov_kind, spec.sigma1, spec.rho1), locs);
  const GrfSampler xi2(score_model(spec.cov_kind, spec.sigma2, spec.rho2), locs);

  constexpr int kMethods = 3;  // cm2 cm3 standard
  const int reps = config.reps;
  struct RepResult {
    std::array<double, kMethods> l1;
    std::array<double, kMethods> l2;
    std::array<char, kMethods> ok;
  };
  std::vector<RepResult> results(reps);

  parallel_for(reps, config.threads, [&](int r) {
    Rng rng(RngStream{config.seed, stream_id(kTagFpcRep, 0, static_cast<std::uint64_t>(r))});
    const Vector s1 = xi1.sample(rng);
    const Vector s2 = xi2.sample(rng);
    const CurveSet data = assemble(grid, locs, zero_curve(grid), {&pop.v1, &pop.v2}, {&s1, &s2});

    RepResult& out = results[r];
    out.ok.fill(0);

    const auto record = [&](int slot, const FpcSet& fpcs) {
      if (fpcs.components.size() < 2) return;
      out.l1[slot] = aligned_l_error(fpcs.components[0], pop.v1);
      out.l2[slot] = aligned_l_error(fpcs.components[1], pop.v2);
      out.ok[slot] = 1;
    };

    // The generated fields are centered by construction, and all three
    // estimators see the same input: the study isolates component
    // estimation, not mean removal (which has its own study).
    try {
      record(0, estimate_fpc_cm2(data, config.K, 2, config.estimator, config.cov_kind));
      record(1, estimate_fpc_cm3(data, config.K, 2, config.estimator, config.cov_kind));
    } catch (const Error&) {
    }
    try {
      record(2, standard_fpc(data, config.K, 2));
    } catch (const Error&) {
    }
  });

  const char* names[kMethods] = {"cm2", "cm3", "standard"};
  FpcStudyReport report;
  report.reps = reps;
  for (int m = 0; m < kMethods; ++m) {
    RunningStats v1_stats, v2_stats;
    for (int r = 0; r < reps; ++r) {
      if (results[r].ok[m]) {
        v1_stats.add(results[r].l1[m]);
        v2_stats.add(results[r].l2[m]);
      } else {
        ++v1_stats.failures;
      }
    }
    const ErrorRow v1_row = v1_stats.row(names[m]);
    const ErrorRow v2_row = v2_stats.row(names[m]);
    FpcErrorRow row;
    row.method = names[m];
    row.reps_used = v1_row.reps_used;
    row.failures = v1_row.failures;
    row.mean_l_v1 = v1_row.mean_l;
    row.se_l_v1 = v1_row.se_l;
    row.mean_l_v2 = v2_row.mean_l;
    row.se_l_v2 = v2_row.se_l;
    report.rows.push_back(row);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Size / power study
// ---------------------------------------------------------------------------

namespace {

struct CellKey {
  std::string method;
  int p;
  int dep_index;
  double rho;
};

}  // namespace

SizePowerReport run_size_power_study(const SizePowerConfig& config) {
  if (config.runs < 1) throw ConfigError("run_size_power_study: runs must be positive");
  if (config.mc_reps < kMinMonteCarloReps)
    throw ConfigError("run_size_power_study: mc_reps below the Monte Carlo minimum");
  if (config.p_max < 1 || config.p_max > 7)
    throw ConfigError("run_size_power_study: p_max must be in 1..7");

  const LocationSet locs = study_locations(config.layout, config.n, config.seed);
  const Grid grid(config.grid_m);
  const Matrix dists = distance_matrix(locs);

  const std::vector<Curve> x_comps = default_x_components(grid);
  const Curve y_comp = default_y_component(grid);

  struct GridPoint {
    int dep_index = 0;  // 0: null
    double rho = 0.0;
  };
  std::vector<GridPoint> points;
  if (config.mode == SizePowerConfig::Mode::Size) {
    points.push_back(GridPoint{0, 0.0});
  } else {
    for (int dep : config.dep_indices)
      for (double rho : config.rho_grid) points.push_back(GridPoint{dep, rho});
  }

  std::vector<std::string> methods;
  if (config.run_s) methods.push_back("S");
  if (config.run_sm) methods.push_back("SM");
  if (config.run_t) methods.push_back("T");
  if (methods.empty()) throw ConfigError("run_size_power_study: no test methods enabled");

  std::vector<int> p_values;
  if (config.mode == SizePowerConfig::Mode::Size) {
    for (int p = 1; p <= config.p_max; ++p) p_values.push_back(p);
  } else {
    p_values.push_back(config.p_fixed);
  }

  PipelineOptions pipe;
  pipe.estimator = config.estimator;
  pipe.mean_kind = config.mean_kind;
  pipe.fpc_kind = config.fpc_kind;
  pipe.K = config.K;

  const int n_cells = static_cast<int>(points.size() * p_values.size() * methods.size());
  const int runs = config.runs;

  SizePowerReport report;
  report.runs = runs;
  std::atomic<int> total_failures{0};

  // cell index = ((point * |p_values| + p_idx) * |methods| + method_idx)
  std::vector<std::atomic<int>> reject_count(n_cells);
  std::vector<std::atomic<int>> used_count(n_cells);
  for (auto& a : reject_count) a.store(0);
  for (auto& a : used_count) a.store(0);

  for (std::size_t g = 0; g < points.size(); ++g) {
    const GridPoint& point = points[g];
    TestDgpSpec spec;
    spec.xi_models = default_xi_models();
    spec.eta_model = default_eta_model();
    spec.rho_dep = point.rho;
    spec.dep_index = std::max(point.dep_index, 1);
    spec.grid_m = config.grid_m;
    const TestDgpSampler sampler(spec, locs, x_comps, y_comp);

    const int p_want = config.mode == SizePowerConfig::Mode::Size ? config.p_max
                                                                  : config.p_fixed;

    parallel_for(runs, config.threads, [&](int r) {
      Rng rng(RngStream{config.seed,
                        stream_id(kTagTestRun, static_cast<std::uint64_t>(g), r)});
      try {
        const PairedCurveSets data = sampler.sample(rng);

        const Curve mean_x = estimate_mean_m2(data.x, pipe.estimator, pipe.mean_kind);
        const Curve mean_y = estimate_mean_m2(data.y, pipe.estimator, pipe.mean_kind);
        const FpcSet x_fpcs = estimate_fpc_cm2(center(data.x, mean_x), pipe.K, p_want,
                                               pipe.estimator, pipe.fpc_kind);
        const FpcSet y_fpcs = estimate_fpc_cm2(center(data.y, mean_y), pipe.K, 1,
                                               pipe.estimator, pipe.fpc_kind);
        const ScoreField x_scores = scores(data.x, mean_x, x_fpcs);
        const ScoreField y_scores = scores(data.y, mean_y, y_fpcs);
        const std::vector<ScoreModel> x_models = fit_score_models(x_scores, pipe.estimator);
        const std::vector<ScoreModel> y_models = fit_score_models(y_scores, pipe.estimator);
        const CrossCov a_full = cross_cov(x_scores, y_scores);
        const int p_have = static_cast<int>(x_models.size());

        for (std::size_t pi = 0; pi < p_values.size(); ++pi) {
          const int p = p_values[pi];
          if (p > p_have) continue;

          CrossCov a;
          a.n = a_full.n;
          a.a = Matrix(p, 1);
          for (int i = 0; i < p; ++i) a.a(i, 0) = a_full.a(i, 0);
          const std::vector<ScoreModel> xm(x_models.begin(), x_models.begin() + p);
          const CovTensor sigma = covariance_tensor(xm, y_models, dists);

          for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            const std::string& method = methods[mi];
            TestResult res;
            if (method == "S") {
              res = test_s(a, sigma);
            } else if (method == "SM") {
              res = test_sm(a, sigma, config.mc_reps,
                            RngStream{config.seed,
                                      stream_id(kTagSm, (g << 8) | p, r)});
            } else {
              res = test_t(a, sigma, config.mc_reps,
                           RngStream{config.seed,
                                     stream_id(kTagT, (g << 8) | p, r)});
            }
            const int cell = static_cast<int>((g * p_values.size() + pi) * methods.size() + mi);
            used_count[cell].fetch_add(1);
            if (res.p_value <= config.alpha) reject_count[cell].fetch_add(1);
          }
        }
      } catch (const Error&) {
        total_failures.fetch_add(1);
      }
    });
  }

  for (std::size_t g = 0; g < points.size(); ++g) {
    for (std::size_t pi = 0; pi < p_values.size(); ++pi) {
      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        const int cell = static_cast<int>((g * p_values.size() + pi) * methods.size() + mi);
        SizePowerRow row;
        row.method = methods[mi];
        row.p = p_values[pi];
        row.dep_index = points[g].dep_index;
        row.rho_dep = points[g].rho;
        row.runs_used = used_count[cell].load();
        row.rejections = reject_count[cell].load();
        row.rate = row.runs_used > 0 ? static_cast<double>(row.rejections) / row.runs_used : 0.0;
        row.mc_se = row.runs_used > 0
                        ? std::sqrt(std::max(0.0, row.rate * (1.0 - row.rate)) / row.runs_used)
                        : 0.0;
        report.rows.push_back(row);
      }
    }
  }
  report.failures = total_failures.load();
  return report;
}

}  // namespace spatfda
