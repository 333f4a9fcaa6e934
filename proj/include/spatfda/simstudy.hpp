#ifndef SPATFDA_SIMSTUDY_HPP
#define SPATFDA_SIMSTUDY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "spatfda/corr_test.hpp"

namespace spatfda {

// ---------------------------------------------------------------------------
// Data generating processes
// ---------------------------------------------------------------------------

/// Gaussian random field sampler over a fixed station set with a cached
/// Cholesky factor of the model covariance matrix.
class GrfSampler {
public:
  GrfSampler(const CovModel& model, const LocationSet& locs);

  /// Draws locs.size() normal deviates from the stream (also when the model
  /// variance is zero, so draw sequences stay aligned).
  Vector sample(Rng& rng) const;

  /// Apply the Cholesky factor to a given standard-normal vector.
  Vector rotate(const Vector& z) const;

  int size() const { return static_cast<int>(factor_.rows()); }

private:
  Matrix factor_;  // lower triangular; zero matrix for a zero-variance model
};

/// Zero-mean Gaussian vector with covariance cov_eval(model, d_kl).
Vector gen_grf_scores(const CovModel& model, const LocationSet& locs, Rng& rng);

enum class MeanKind { Fourier, Sqrt, None };

/// Mean-study process: X(s;t) = mu(t) + xi1(s) e1(t) + xi2(s) e2(t) with
/// e1 = sqrt(2) sin(12 pi t), e2 = sqrt(2) sin(pi t).
struct MeanDgpSpec {
  MeanKind mean_kind = MeanKind::Sqrt;
  CovKind cov_kind = CovKind::Exponential;
  double sigma1 = 1.0;
  double rho1 = 0.5235987755982988;  // pi/6
  double sigma2 = 0.1;
  double rho2 = 0.7853981633974483;  // pi/4
  int grid_m = 336;
};

Curve mean_dgp_mean_curve(MeanKind kind, const Grid& grid);
CurveSet gen_mean_dgp(const MeanDgpSpec& spec, const LocationSet& locs, Rng& rng);

/// FPC-study process: X = xi1 (e1+e2)/sqrt(2) + xi2 e3 with
/// e1 = sqrt(2) sin(14 pi t), e2 = sqrt(2) sin(4 pi t), e3 = sqrt(2) sin(9 pi t).
/// The population components are v1 = (e1+e2)/sqrt(2) and v2 = e3.
struct FpcDgpSpec {
  CovKind cov_kind = CovKind::Exponential;
  double sigma1 = 1.0;
  double rho1 = 0.5235987755982988;
  double sigma2 = 0.1;
  double rho2 = 0.7853981633974483;
  int grid_m = 336;
};

struct FpcPopulation {
  Curve v1;
  Curve v2;
};

FpcPopulation fpc_dgp_population(const Grid& grid);
CurveSet gen_fpc_dgp(const FpcDgpSpec& spec, const LocationSet& locs, Rng& rng);

/// Correlation-test process: X = sum_i xi_i v_i (p = 7), Y = eta u_1, with
/// the per-component spatial models of the production data analysis. Under
/// the alternative, the standard vector behind xi_{dep_index} and the one
/// behind eta are drawn as correlated pairs before the Cholesky rotation.
struct TestDgpSpec {
  std::vector<CovModel> xi_models;  // size 7 by default
  CovModel eta_model;
  double rho_dep = 0.0;
  int dep_index = 1;  // 1-based, in 1..4 when rho_dep > 0
  int grid_m = 336;
};

/// Estimated covariance parameters of the production analysis (the default
/// xi_1..xi_7 and eta models).
std::vector<CovModel> default_xi_models();
CovModel default_eta_model();
TestDgpSpec default_test_dgp_spec();

/// Default FPC curves for the test process: v_i = sqrt(2) sin(2 pi i t) and
/// u_1 = sqrt(3) (2t - 1).
std::vector<Curve> default_x_components(const Grid& grid);
Curve default_y_component(const Grid& grid);

class TestDgpSampler {
public:
  TestDgpSampler(const TestDgpSpec& spec, const LocationSet& locs,
                 std::vector<Curve> x_components, Curve y_component);

  PairedCurveSets sample(Rng& rng) const;

  /// Raw score vectors of the last dependence construction, for diagnostics.
  struct RawScores {
    std::vector<Vector> xi;
    Vector eta;
  };
  RawScores sample_scores(Rng& rng) const;

private:
  TestDgpSpec spec_;
  LocationSet locs_;
  std::vector<Curve> x_components_;
  Curve y_component_;
  std::vector<GrfSampler> xi_samplers_;
  GrfSampler eta_sampler_;
};

PairedCurveSets gen_test_dgp(const TestDgpSpec& spec, const LocationSet& locs,
                             const std::vector<Curve>& x_components,
                             const Curve& y_component, Rng& rng);

// ---------------------------------------------------------------------------
// Replicated studies
// ---------------------------------------------------------------------------

/// Integrated absolute error between an estimate and the truth.
double l_error(const Curve& estimate, const Curve& truth);

/// Same, after flipping the estimate's sign when <estimate, truth> < 0
/// (eigenfunctions are sign-ambiguous).
double aligned_l_error(const Curve& estimate, const Curve& truth);

struct LayoutChoice {
  Layout layout = Layout::Clustered;
  std::string locations_file;  // overrides layout when nonempty
};

struct MeanStudyConfig {
  int n = 100;
  int reps = 200;
  MeanKind mean_kind = MeanKind::Sqrt;
  CovKind cov_kind = CovKind::Exponential;
  VarioEstimator estimator = VarioEstimator::MT;
  LayoutChoice layout;
  int grid_m = 336;
  int K = 0;  // 0: default basis rule (for M3)
  std::uint64_t seed = 0;
  int threads = 0;  // 0: hardware concurrency
};

struct ErrorRow {
  std::string method;
  int reps_used = 0;
  int failures = 0;
  double mean_l = 0.0;
  double se_l = 0.0;
};

struct MeanStudyReport {
  std::vector<ErrorRow> rows;  // m1a, m1b, m2, m3, simple
  double m1_success_fraction = 0.0;
  int reps = 0;
};

MeanStudyReport run_mean_study(const MeanStudyConfig& config);

struct FpcStudyConfig {
  int n = 100;
  int reps = 200;
  CovKind cov_kind = CovKind::Exponential;
  VarioEstimator estimator = VarioEstimator::CH;
  LayoutChoice layout;
  int grid_m = 336;
  int K = 0;
  std::uint64_t seed = 0;
  int threads = 0;
};

struct FpcErrorRow {
  std::string method;
  int reps_used = 0;
  int failures = 0;
  double mean_l_v1 = 0.0;
  double se_l_v1 = 0.0;
  double mean_l_v2 = 0.0;
  double se_l_v2 = 0.0;
};

struct FpcStudyReport {
  std::vector<FpcErrorRow> rows;  // cm2, cm3, standard
  int reps = 0;
};

FpcStudyReport run_fpc_study(const FpcStudyConfig& config);

struct SizePowerConfig {
  enum class Mode { Size, Power };
  Mode mode = Mode::Size;
  int n = 32;
  int runs = 2000;
  long mc_reps = 10000;
  double alpha = 0.05;
  int p_max = 7;    // size mode: evaluate p = 1..p_max
  int p_fixed = 4;  // power mode
  std::vector<double> rho_grid = {0.0, 0.25, 0.5, 0.75, 0.9};
  std::vector<int> dep_indices = {1, 2, 3, 4};
  VarioEstimator estimator = VarioEstimator::MT;
  CovKind mean_kind = CovKind::Exponential;
  CovKind fpc_kind = CovKind::Exponential;
  LayoutChoice layout;
  int grid_m = 336;
  int K = 0;
  std::uint64_t seed = 0;
  int threads = 0;
  bool run_s = true;
  bool run_sm = true;
  bool run_t = true;
};

struct SizePowerRow {
  std::string method;
  int p = 0;
  int dep_index = 0;    // 0 under the null
  double rho_dep = 0.0;
  int runs_used = 0;
  int rejections = 0;
  double rate = 0.0;
  double mc_se = 0.0;
};

struct SizePowerReport {
  std::vector<SizePowerRow> rows;
  int failures = 0;
  int runs = 0;
};

SizePowerReport run_size_power_study(const SizePowerConfig& config);

/// Resolve the station set for a study configuration (file, or sampled layout
/// from the study seed).
LocationSet study_locations(const LayoutChoice& layout, int n, std::uint64_t seed);

/// Chunked parallel loop; bodies must write to disjoint state. threads <= 0
/// uses the hardware concurrency.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

}  // namespace spatfda

#endif
