#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "spatfda/io.hpp"

namespace {

using namespace spatfda;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag.has_value()) return *flag;
  if (const char* env = std::getenv("SPATFDA_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError("SPATFDA_SEED is not an integer");
    }
  }
  return 0;
}

VarioEstimator parse_estimator(const std::string& name) {
  if (name == "mt") return VarioEstimator::MT;
  if (name == "ch") return VarioEstimator::CH;
  throw ConfigError("estimator must be mt or ch");
}

CovKind parse_kind(const std::string& name) {
  if (name == "exponential") return CovKind::Exponential;
  if (name == "gaussian") return CovKind::Gaussian;
  throw ConfigError("model kind must be exponential or gaussian");
}

Layout parse_layout(const std::string& name) {
  if (name == "clustered") return Layout::Clustered;
  if (name == "uniform") return Layout::UniformSphere;
  throw ConfigError("layout must be clustered or uniform");
}

/// Curves plus their stations, from one combined file or two separate ones.
CurveSet load_curve_set(const std::string& curves_path, const std::string& locations_path) {
  CurveTable table = read_curves_csv(curves_path);
  if (!locations_path.empty()) {
    LocationSet locs = read_locations_csv(locations_path);
    if (locs.size() != static_cast<int>(table.curves.size()))
      throw LengthMismatch("curve count differs from location count");
    return CurveSet(std::move(table.curves), std::move(locs));
  }
  if (!table.locations.has_value())
    throw ConfigError("curves file has no lat_deg/lon_deg columns; pass --locations");
  return CurveSet(std::move(table.curves), std::move(*table.locations));
}

// ---------------------------------------------------------------------------
// study
// ---------------------------------------------------------------------------

struct StudyArgs {
  std::string kind;
  int n = 100;
  int reps = 200;
  int runs = 2000;
  long mc_reps = 10000;
  double alpha = 0.05;
  int p_max = 7;
  int p_fixed = 4;
  std::string mean_kind = "sqrt";
  std::string cov = "exponential";
  std::string estimator = "mt";
  std::string layout = "clustered";
  std::string locations_file;
  std::vector<double> rho_grid = {0.0, 0.25, 0.5, 0.75, 0.9};
  std::vector<int> dep_indices = {1, 2, 3, 4};
  int grid_m = 336;
  int K = 0;
  int threads = 0;
  std::optional<std::uint64_t> seed;
  std::string out_csv;
  std::string out_json;
};

/// Study configuration from a JSON file; keys mirror the flag names.
void apply_study_config(const std::string& path, StudyArgs& args) {
  std::ifstream in(path);
  if (!in) throw FileFormat("cannot open config file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FileFormat(std::string("config JSON: ") + e.what());
  }
  try {
    if (j.contains("kind")) args.kind = j["kind"].get<std::string>();
    if (j.contains("n")) args.n = j["n"].get<int>();
    if (j.contains("reps")) args.reps = j["reps"].get<int>();
    if (j.contains("runs")) args.runs = j["runs"].get<int>();
    if (j.contains("mc_reps")) args.mc_reps = j["mc_reps"].get<long>();
    if (j.contains("alpha")) args.alpha = j["alpha"].get<double>();
    if (j.contains("p_max")) args.p_max = j["p_max"].get<int>();
    if (j.contains("p")) args.p_fixed = j["p"].get<int>();
    if (j.contains("mean")) args.mean_kind = j["mean"].get<std::string>();
    if (j.contains("cov")) args.cov = j["cov"].get<std::string>();
    if (j.contains("estimator")) args.estimator = j["estimator"].get<std::string>();
    if (j.contains("layout")) args.layout = j["layout"].get<std::string>();
    if (j.contains("locations")) args.locations_file = j["locations"].get<std::string>();
    if (j.contains("rho_grid")) args.rho_grid = j["rho_grid"].get<std::vector<double>>();
    if (j.contains("dep_index")) args.dep_indices = j["dep_index"].get<std::vector<int>>();
    if (j.contains("grid")) args.grid_m = j["grid"].get<int>();
    if (j.contains("basis_k")) args.K = j["basis_k"].get<int>();
    if (j.contains("threads")) args.threads = j["threads"].get<int>();
    if (j.contains("seed")) args.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) args.out_csv = j["out"].get<std::string>();
    if (j.contains("json")) args.out_json = j["json"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw FileFormat(std::string("config JSON: ") + e.what());
  }
}

int run_study(const StudyArgs& args) {
  if (args.kind.empty())
    throw ConfigError("--kind (or a config file providing it) is required");
  const std::uint64_t seed = resolve_seed(args.seed);
  LayoutChoice layout;
  layout.layout = parse_layout(args.layout);
  layout.locations_file = args.locations_file;

  if (args.kind == "mean") {
    MeanStudyConfig config;
    config.n = args.n;
    config.reps = args.reps;
    config.mean_kind = args.mean_kind == "fourier" ? MeanKind::Fourier : MeanKind::Sqrt;
    if (args.mean_kind != "fourier" && args.mean_kind != "sqrt")
      throw ConfigError("--mean must be fourier or sqrt");
    config.cov_kind = parse_kind(args.cov);
    config.estimator = parse_estimator(args.estimator);
    config.layout = layout;
    config.grid_m = args.grid_m;
    config.K = args.K;
    config.seed = seed;
    config.threads = args.threads;
    const MeanStudyReport report = run_mean_study(config);
    if (!args.out_csv.empty()) write_mean_study_csv(args.out_csv, report);
    if (!args.out_json.empty()) atomic_write_text(args.out_json, mean_study_json(report));
    std::cout << mean_study_json(report);
    return kExitOk;
  }
  if (args.kind == "fpc") {
    FpcStudyConfig config;
    config.n = args.n;
    config.reps = args.reps;
    config.cov_kind = parse_kind(args.cov);
    config.estimator = parse_estimator(args.estimator);
    config.layout = layout;
    config.grid_m = args.grid_m;
    config.K = args.K;
    config.seed = seed;
    config.threads = args.threads;
    const FpcStudyReport report = run_fpc_study(config);
    if (!args.out_csv.empty()) write_fpc_study_csv(args.out_csv, report);
    if (!args.out_json.empty()) atomic_write_text(args.out_json, fpc_study_json(report));
    std::cout << fpc_study_json(report);
    return kExitOk;
  }
  if (args.kind == "size" || args.kind == "power") {
    SizePowerConfig config;
    config.mode = args.kind == "size" ? SizePowerConfig::Mode::Size
                                      : SizePowerConfig::Mode::Power;
    config.n = args.n;
    config.runs = args.runs;
    config.mc_reps = args.mc_reps;
    config.alpha = args.alpha;
    config.p_max = args.p_max;
    config.p_fixed = args.p_fixed;
    config.rho_grid = args.rho_grid;
    config.dep_indices = args.dep_indices;
    config.estimator = parse_estimator(args.estimator);
    config.layout = layout;
    config.grid_m = args.grid_m;
    config.K = args.K;
    config.seed = seed;
    config.threads = args.threads;
    const SizePowerReport report = run_size_power_study(config);
    if (!args.out_csv.empty()) write_size_power_csv(args.out_csv, report);
    if (!args.out_json.empty()) atomic_write_text(args.out_json, size_power_json(report));
    std::cout << size_power_json(report);
    return kExitOk;
  }
  throw ConfigError("--kind must be one of mean, fpc, size, power");
}

// ---------------------------------------------------------------------------
// test
// ---------------------------------------------------------------------------

struct TestArgs {
  std::string x_path;
  std::string y_path;
  std::string locations;
  int p = 0;
  int q = 1;
  int K = 0;
  long mc_reps = 10000;
  std::string estimator = "mt";
  std::string kind = "exponential";
  std::string mean_method = "m2";
  std::string fpc_method = "cm2";
  std::optional<std::uint64_t> seed;
  std::string out_json;
};

int run_test(const TestArgs& args) {
  const CurveSet x = load_curve_set(args.x_path, args.locations);
  const CurveSet y = load_curve_set(args.y_path, args.locations);
  if (x.size() != y.size()) throw LengthMismatch("X and Y files have different N");

  PipelineOptions options;
  options.estimator = parse_estimator(args.estimator);
  options.mean_kind = parse_kind(args.kind);
  options.fpc_kind = options.mean_kind;
  options.p = args.p;
  options.q = args.q;
  options.K = args.K;
  options.mc_reps = args.mc_reps;
  options.seed = resolve_seed(args.seed);
  if (args.mean_method == "m1a") options.mean_method = MeanMethod::M1a;
  else if (args.mean_method == "m1b") options.mean_method = MeanMethod::M1b;
  else if (args.mean_method == "m2") options.mean_method = MeanMethod::M2;
  else if (args.mean_method == "m3") options.mean_method = MeanMethod::M3;
  else if (args.mean_method == "simple") options.mean_method = MeanMethod::Simple;
  else throw ConfigError("--mean-method must be m1a, m1b, m2, m3 or simple");
  if (args.fpc_method == "cm2") options.fpc_method = FpcMethod::CM2;
  else if (args.fpc_method == "cm3") options.fpc_method = FpcMethod::CM3;
  else if (args.fpc_method == "standard") options.fpc_method = FpcMethod::Standard;
  else throw ConfigError("--fpc-method must be cm2, cm3 or standard");

  const PipelineResult result = run_correlation_pipeline(x, y, options);
  const std::string text = pipeline_result_json(result);
  if (!args.out_json.empty()) atomic_write_text(args.out_json, text);
  std::cout << text;
  return kExitOk;
}

// ---------------------------------------------------------------------------
// mean / fpc / variogram / simulate / descale
// ---------------------------------------------------------------------------

struct MeanArgs {
  std::string in_path;
  std::string locations;
  std::string method = "m2";
  std::string estimator = "mt";
  std::string kind = "exponential";
  int K = 0;
  std::string out_path;
};

int run_mean(const MeanArgs& args) {
  const CurveSet data = load_curve_set(args.in_path, args.locations);
  const VarioEstimator est = parse_estimator(args.estimator);
  const CovKind kind = parse_kind(args.kind);
  Curve mean = zero_curve(data.grid());
  if (args.method == "m1a") mean = estimate_mean_m1(data, M1Variant::A, est, kind);
  else if (args.method == "m1b") mean = estimate_mean_m1(data, M1Variant::B, est, kind);
  else if (args.method == "m2") mean = estimate_mean_m2(data, est, kind);
  else if (args.method == "m3") mean = estimate_mean_m3(data, args.K, est, kind);
  else if (args.method == "simple") mean = sample_mean(data);
  else throw ConfigError("--method must be m1a, m1b, m2, m3 or simple");
  write_curve_csv(args.out_path, mean);
  return kExitOk;
}

struct FpcArgs {
  std::string in_path;
  std::string locations;
  std::string method = "cm2";
  std::string center_method = "m2";
  std::string estimator = "mt";
  std::string kind = "exponential";
  int p = 0;
  int K = 0;
  std::string out_values;
  std::string out_components;
};

int run_fpc(const FpcArgs& args) {
  const CurveSet data = load_curve_set(args.in_path, args.locations);
  const VarioEstimator est = parse_estimator(args.estimator);
  const CovKind kind = parse_kind(args.kind);

  CurveSet centered = data;
  if (args.center_method == "m2") {
    centered = center(data, estimate_mean_m2(data, est, kind));
  } else if (args.center_method == "simple") {
    centered = center(data, sample_mean(data));
  } else if (args.center_method != "none") {
    throw ConfigError("--center must be m2, simple or none");
  }

  FpcSet fpcs;
  if (args.method == "cm2") fpcs = estimate_fpc_cm2(centered, args.K, args.p, est, kind);
  else if (args.method == "cm3") fpcs = estimate_fpc_cm3(centered, args.K, args.p, est, kind);
  else if (args.method == "standard") fpcs = standard_fpc(centered, args.K, args.p);
  else throw ConfigError("--method must be cm2, cm3 or standard");

  if (!args.out_values.empty()) write_fpc_values_csv(args.out_values, fpcs);
  if (!args.out_components.empty()) write_fpc_components_csv(args.out_components, fpcs);
  return kExitOk;
}

struct VariogramArgs {
  std::string in_path;
  std::string locations;
  std::string type = "functional";
  int t_index = 0;
  std::string estimator = "mt";
  int bins = kDefaultVariogramBins;
  std::string fit_kind;
  bool nugget = false;
  std::string out_path;
};

int run_variogram(const VariogramArgs& args) {
  const CurveSet data = load_curve_set(args.in_path, args.locations);
  DissimilarityCloud cloud;
  if (args.type == "functional") {
    cloud = functional_cloud(data);
  } else if (args.type == "hs") {
    cloud = hs_cloud(data);
  } else if (args.type == "scalar") {
    if (args.t_index < 1 || args.t_index > data.grid().size())
      throw ConfigError("--t-index out of range");
    Vector values(data.size());
    for (int k = 0; k < data.size(); ++k)
      values[k] = data.curve(k).values[args.t_index - 1];
    cloud = scalar_cloud(values, distance_matrix(data.locations()));
  } else {
    throw ConfigError("--type must be functional, hs or scalar");
  }

  const EmpiricalVariogram emp =
      empirical_variogram(cloud, parse_estimator(args.estimator), args.bins);
  write_variogram_csv(args.out_path, emp);

  if (!args.fit_kind.empty()) {
    const CovModel model = fit_cov_model(emp, parse_kind(args.fit_kind), args.nugget);
    std::cout << "fit: kind=" << to_string(model.kind) << " c0=" << model.c0
              << " sigma2=" << model.sigma2;
    if (model.kind != CovKind::Flat) std::cout << " rho=" << model.rho;
    std::cout << "\n";
  }
  return kExitOk;
}

struct SimulateArgs {
  std::string kind = "mean";
  int n = 100;
  std::string mean_kind = "sqrt";
  std::string cov = "exponential";
  std::string layout = "clustered";
  std::string locations;
  double rho_dep = 0.0;
  int dep_index = 1;
  int grid_m = 336;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string out_y_path;
};

int run_simulate(const SimulateArgs& args) {
  const std::uint64_t seed = resolve_seed(args.seed);
  LayoutChoice layout;
  layout.layout = parse_layout(args.layout);
  layout.locations_file = args.locations;
  const LocationSet locs = study_locations(layout, args.n, seed);
  Rng rng(RngStream{seed, 0xDA7AULL});

  if (args.kind == "mean") {
    MeanDgpSpec spec;
    spec.mean_kind = args.mean_kind == "fourier" ? MeanKind::Fourier : MeanKind::Sqrt;
    spec.cov_kind = parse_kind(args.cov);
    spec.grid_m = args.grid_m;
    write_curves_csv(args.out_path, gen_mean_dgp(spec, locs, rng));
    return kExitOk;
  }
  if (args.kind == "fpc") {
    FpcDgpSpec spec;
    spec.cov_kind = parse_kind(args.cov);
    spec.grid_m = args.grid_m;
    write_curves_csv(args.out_path, gen_fpc_dgp(spec, locs, rng));
    return kExitOk;
  }
  if (args.kind == "test") {
    if (args.out_y_path.empty()) throw ConfigError("simulate --kind test needs --out-y");
    TestDgpSpec spec = default_test_dgp_spec();
    spec.rho_dep = args.rho_dep;
    spec.dep_index = args.dep_index;
    spec.grid_m = args.grid_m;
    const Grid grid(args.grid_m);
    const PairedCurveSets data =
        gen_test_dgp(spec, locs, default_x_components(grid), default_y_component(grid), rng);
    write_curves_csv(args.out_path, data.x);
    write_curves_csv(args.out_y_path, data.y);
    return kExitOk;
  }
  throw ConfigError("--kind must be mean, fpc or test");
}

struct DescaleArgs {
  std::string in_path;
  std::string locations;
  std::string model_path;
  bool fit = false;
  int ref_index = 0;  // 1-based; 0 = auto (closest to the equator)
  std::string out_path;
  std::string out_model;
};

int run_descale(const DescaleArgs& args) {
  const CurveSet data = load_curve_set(args.in_path, args.locations);
  ScaleModel model;
  if (!args.model_path.empty()) {
    std::ifstream in(args.model_path);
    if (!in) throw FileFormat("cannot open model file: " + args.model_path);
    std::ostringstream text;
    text << in.rdbuf();
    model = scale_model_from_json(text.str());
  } else if (args.fit) {
    const int ref = args.ref_index > 0 ? args.ref_index - 1
                                       : reference_station(data.locations());
    const ScaleFit fit = fit_scale(scale_ratios(data, ref));
    if (!fit.converged) std::cerr << "warning: scale fit did not converge cleanly\n";
    model = fit.model;
  } else {
    throw ConfigError("descale needs --model FILE or --fit");
  }

  write_curves_csv(args.out_path, descale(data, model));
  if (!args.out_model.empty()) atomic_write_text(args.out_model, scale_model_json(model));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Estimation and correlation testing for spatially indexed curves"};
  app.require_subcommand(1);

  StudyArgs study;
  CLI::App* study_cmd = app.add_subcommand(
      "study", "Run a replicated simulation study (mean, fpc, size, power)");
  std::string study_config_path;
  study_cmd->add_option("--config", study_config_path,
                        "JSON config file (keys mirror the flag names)");
  study_cmd->add_option("--kind", study.kind, "mean | fpc | size | power");
  study_cmd->add_option("--n", study.n, "number of stations")->check(CLI::PositiveNumber);
  study_cmd->add_option("--reps", study.reps, "replications (mean/fpc studies)")
      ->check(CLI::PositiveNumber);
  study_cmd->add_option("--runs", study.runs, "independent runs (size/power studies)")
      ->check(CLI::PositiveNumber);
  study_cmd->add_option("--mc-reps", study.mc_reps, "Monte Carlo replicates per test")
      ->check(CLI::PositiveNumber);
  study_cmd->add_option("--alpha", study.alpha, "nominal level");
  study_cmd->add_option("--p-max", study.p_max, "largest p for the size study");
  study_cmd->add_option("--p", study.p_fixed, "p for the power study");
  study_cmd->add_option("--mean", study.mean_kind, "mean shape: fourier | sqrt");
  study_cmd->add_option("--cov", study.cov, "score model: exponential | gaussian");
  study_cmd->add_option("--estimator", study.estimator, "variogram estimator: mt | ch");
  study_cmd->add_option("--layout", study.layout, "station layout: clustered | uniform");
  study_cmd->add_option("--locations", study.locations_file, "station CSV (overrides layout)");
  study_cmd->add_option("--rho-grid", study.rho_grid, "dependence grid (power study)");
  study_cmd->add_option("--dep-index", study.dep_indices, "coupled components (power study)");
  study_cmd->add_option("--grid", study.grid_m, "grid size m")->check(CLI::PositiveNumber);
  study_cmd->add_option("--basis-k", study.K, "basis size (0 = default rule)");
  study_cmd->add_option("--threads", study.threads, "worker threads (0 = auto)");
  study_cmd->add_option("--seed", study.seed, "master seed (SPATFDA_SEED fallback)");
  study_cmd->add_option("--out", study.out_csv, "report CSV path");
  study_cmd->add_option("--json", study.out_json, "report JSON path");

  TestArgs test;
  CLI::App* test_cmd = app.add_subcommand("test", "Correlation test between two curve files");
  test_cmd->add_option("--x", test.x_path, "X curves CSV")->required();
  test_cmd->add_option("--y", test.y_path, "Y curves CSV")->required();
  test_cmd->add_option("--locations", test.locations, "station CSV (when not embedded)");
  test_cmd->add_option("--p", test.p, "X components (0 = 85% variance rule)");
  test_cmd->add_option("--q", test.q, "Y components");
  test_cmd->add_option("--basis-k", test.K, "basis size (0 = default rule)");
  test_cmd->add_option("--mc-reps", test.mc_reps, "Monte Carlo replicates");
  test_cmd->add_option("--estimator", test.estimator, "variogram estimator: mt | ch");
  test_cmd->add_option("--kind", test.kind, "spatial model kind for the weights");
  test_cmd->add_option("--mean-method", test.mean_method, "m1a | m1b | m2 | m3 | simple");
  test_cmd->add_option("--fpc-method", test.fpc_method, "cm2 | cm3 | standard");
  test_cmd->add_option("--seed", test.seed, "seed (SPATFDA_SEED fallback)");
  test_cmd->add_option("--out", test.out_json, "result JSON path");

  MeanArgs mean;
  CLI::App* mean_cmd = app.add_subcommand("mean", "Estimate the mean function from a file");
  mean_cmd->add_option("--in", mean.in_path, "curves CSV")->required();
  mean_cmd->add_option("--locations", mean.locations, "station CSV");
  mean_cmd->add_option("--method", mean.method, "m1a | m1b | m2 | m3 | simple");
  mean_cmd->add_option("--estimator", mean.estimator, "mt | ch");
  mean_cmd->add_option("--kind", mean.kind, "exponential | gaussian");
  mean_cmd->add_option("--basis-k", mean.K, "basis size for m3 (0 = default)");
  mean_cmd->add_option("--out", mean.out_path, "output curve CSV")->required();

  FpcArgs fpc;
  CLI::App* fpc_cmd = app.add_subcommand("fpc", "Estimate functional principal components");
  fpc_cmd->add_option("--in", fpc.in_path, "curves CSV")->required();
  fpc_cmd->add_option("--locations", fpc.locations, "station CSV");
  fpc_cmd->add_option("--method", fpc.method, "cm2 | cm3 | standard");
  fpc_cmd->add_option("--center", fpc.center_method, "m2 | simple | none");
  fpc_cmd->add_option("--estimator", fpc.estimator, "mt | ch");
  fpc_cmd->add_option("--kind", fpc.kind, "exponential | gaussian");
  fpc_cmd->add_option("--p", fpc.p, "components (0 = 85% rule)");
  fpc_cmd->add_option("--basis-k", fpc.K, "basis size (0 = default rule)");
  fpc_cmd->add_option("--out-values", fpc.out_values, "eigenvalue CSV");
  fpc_cmd->add_option("--out-components", fpc.out_components, "component curves CSV");

  VariogramArgs vario;
  CLI::App* vario_cmd = app.add_subcommand("variogram", "Empirical variogram of a curve file");
  vario_cmd->add_option("--in", vario.in_path, "curves CSV")->required();
  vario_cmd->add_option("--locations", vario.locations, "station CSV");
  vario_cmd->add_option("--type", vario.type, "functional | hs | scalar");
  vario_cmd->add_option("--t-index", vario.t_index, "grid point for --type scalar (1-based)");
  vario_cmd->add_option("--estimator", vario.estimator, "mt | ch");
  vario_cmd->add_option("--bins", vario.bins, "bin count");
  vario_cmd->add_option("--fit", vario.fit_kind, "also fit: exponential | gaussian");
  vario_cmd->add_flag("--nugget", vario.nugget, "allow a nugget in the fit");
  vario_cmd->add_option("--out", vario.out_path, "variogram CSV")->required();

  SimulateArgs sim;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Draw synthetic curve data sets");
  sim_cmd->add_option("--kind", sim.kind, "mean | fpc | test");
  sim_cmd->add_option("--n", sim.n, "number of stations")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--mean", sim.mean_kind, "fourier | sqrt");
  sim_cmd->add_option("--cov", sim.cov, "exponential | gaussian");
  sim_cmd->add_option("--layout", sim.layout, "clustered | uniform");
  sim_cmd->add_option("--locations", sim.locations, "station CSV (overrides layout)");
  sim_cmd->add_option("--rho-dep", sim.rho_dep, "dependence correlation (test kind)");
  sim_cmd->add_option("--dep-index", sim.dep_index, "coupled component (test kind)");
  sim_cmd->add_option("--grid", sim.grid_m, "grid size m");
  sim_cmd->add_option("--seed", sim.seed, "seed (SPATFDA_SEED fallback)");
  sim_cmd->add_option("--out", sim.out_path, "output curves CSV")->required();
  sim_cmd->add_option("--out-y", sim.out_y_path, "Y curves CSV (test kind)");

  DescaleArgs descale_args;
  CLI::App* descale_cmd =
      app.add_subcommand("descale", "Remove the latitudinal amplitude trend");
  descale_cmd->add_option("--in", descale_args.in_path, "curves CSV")->required();
  descale_cmd->add_option("--locations", descale_args.locations, "station CSV");
  descale_cmd->add_option("--model", descale_args.model_path, "scale model JSON");
  descale_cmd->add_flag("--fit", descale_args.fit, "fit the scale model from the data");
  descale_cmd->add_option("--ref-index", descale_args.ref_index,
                          "reference station (1-based; default: closest to the equator)");
  descale_cmd->add_option("--out", descale_args.out_path, "output curves CSV")->required();
  descale_cmd->add_option("--out-model", descale_args.out_model, "fitted model JSON");

  // Config file values act as defaults; explicit flags override them.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      try {
        apply_study_config(argv[i + 1], study);
      } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
      }
      break;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (study_cmd->parsed()) return run_study(study);
    if (test_cmd->parsed()) return run_test(test);
    if (mean_cmd->parsed()) return run_mean(mean);
    if (fpc_cmd->parsed()) return run_fpc(fpc);
    if (vario_cmd->parsed()) return run_variogram(vario);
    if (sim_cmd->parsed()) return run_simulate(sim);
    if (descale_cmd->parsed()) return run_descale(descale_args);
    std::cerr << "no subcommand given\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const FileFormat& e) {
    std::cerr << "file error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const LengthMismatch& e) {
    std::cerr << "input mismatch: " << e.what() << "\n";
    return kExitConfig;
  } catch (const LocationMismatch& e) {
    std::cerr << "input mismatch: " << e.what() << "\n";
    return kExitConfig;
  } catch (const GridMismatch& e) {
    std::cerr << "input mismatch: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
