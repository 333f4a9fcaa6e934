#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

const std::string kCli = SPATFDA_CLI_PATH;

int run(const std::string& args) {
  const std::string command = kCli + " " + args + " > cli_stdout.txt 2> cli_stderr.txt";
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

bool exists(const std::string& path) { return static_cast<bool>(std::ifstream(path)); }

void cleanup(std::initializer_list<std::string> paths) {
  for (const std::string& p : paths) std::remove(p.c_str());
}

}  // namespace

TEST_CASE("study command writes a five-row mean report and is bitwise reproducible") {
  const std::string invocation =
      "study --kind mean --n 16 --reps 8 --grid 60 --seed 7 --out cli_mean.csv";
  CHECK(run(invocation) == 0);
  REQUIRE(exists("cli_mean.csv"));
  const std::string first = slurp("cli_mean.csv");
  CHECK(first.find("m1a") != std::string::npos);
  CHECK(first.find("m1b") != std::string::npos);
  CHECK(first.find("m2") != std::string::npos);
  CHECK(first.find("m3") != std::string::npos);
  CHECK(first.find("simple") != std::string::npos);

  CHECK(run(invocation) == 0);
  CHECK(slurp("cli_mean.csv") == first);
  cleanup({"cli_mean.csv"});
}

TEST_CASE("study command validates the replication count") {
  CHECK(run("study --kind mean --n 16 --reps 0 --out cli_bad.csv") == 2);
  CHECK_FALSE(exists("cli_bad.csv"));
}

TEST_CASE("study command rejects an unknown kind") {
  CHECK(run("study --kind banana --out cli_bad.csv") == 2);
}

TEST_CASE("simulate then test: a null pair yields a complete result JSON") {
  CHECK(run("simulate --kind test --n 24 --grid 120 --seed 11 --out cli_x.csv "
            "--out-y cli_y.csv") == 0);
  REQUIRE(exists("cli_x.csv"));
  REQUIRE(exists("cli_y.csv"));

  CHECK(run("test --x cli_x.csv --y cli_y.csv --p 2 --mc-reps 1000 --seed 3 "
            "--out cli_test.json") == 0);
  const std::string json = slurp("cli_test.json");
  CHECK(json.find("\"schema_version\": 1") != std::string::npos);
  CHECK(json.find("\"method\": \"S\"") != std::string::npos);
  CHECK(json.find("\"method\": \"SM\"") != std::string::npos);
  CHECK(json.find("\"method\": \"T\"") != std::string::npos);
  CHECK(json.find("x_score_models") != std::string::npos);

  // determinism under a fixed seed
  CHECK(run("test --x cli_x.csv --y cli_y.csv --p 2 --mc-reps 1000 --seed 3 "
            "--out cli_test2.json") == 0);
  CHECK(slurp("cli_test2.json") == json);
  cleanup({"cli_test.json", "cli_test2.json"});
}

TEST_CASE("test command: a zero Y field gives p-values near one") {
  std::ofstream y("cli_zero_y.csv");
  y << slurp("cli_y.csv");
  y.close();
  {
    std::ifstream in("cli_y.csv");
    std::ofstream out("cli_zero_y.csv");
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
      if (header || (!line.empty() && line[0] == '#')) {
        out << line << "\n";
        if (!line.empty() && line[0] != '#') header = false;
        continue;
      }
      // zero all grid columns, keep the trailing lat/lon pair
      std::stringstream ss(line);
      std::string field;
      std::vector<std::string> fields;
      while (std::getline(ss, field, ',')) fields.push_back(field);
      for (std::size_t i = 0; i + 2 < fields.size(); ++i) fields[i] = "0.0";
      for (std::size_t i = 0; i < fields.size(); ++i)
        out << (i ? "," : "") << fields[i];
      out << "\n";
    }
  }
  CHECK(run("test --x cli_x.csv --y cli_zero_y.csv --p 2 --mc-reps 1000 --seed 3 "
            "--out cli_zero.json") == 3);  // a zero field has no principal component
  cleanup({"cli_zero_y.csv", "cli_zero.json"});
}

TEST_CASE("test command rejects mismatched N") {
  // drop the last row of Y
  {
    std::ifstream in("cli_y.csv");
    std::ofstream out("cli_short_y.csv");
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    for (std::size_t i = 0; i + 1 < lines.size(); ++i) out << lines[i] << "\n";
  }
  CHECK(run("test --x cli_x.csv --y cli_short_y.csv --p 2 --mc-reps 1000 "
            "--out cli_mm.json") == 2);
  cleanup({"cli_short_y.csv", "cli_mm.json", "cli_x.csv", "cli_y.csv"});
}

TEST_CASE("mean, fpc and variogram commands run on simulated data") {
  CHECK(run("simulate --kind mean --n 20 --grid 120 --seed 5 --out cli_curves.csv") == 0);
  CHECK(run("mean --in cli_curves.csv --method m2 --out cli_mu.csv") == 0);
  CHECK(exists("cli_mu.csv"));

  CHECK(run("fpc --in cli_curves.csv --method cm2 --p 2 --center m2 "
            "--out-values cli_vals.csv --out-components cli_comps.csv") == 0);
  CHECK(exists("cli_vals.csv"));
  CHECK(exists("cli_comps.csv"));

  CHECK(run("variogram --in cli_curves.csv --type functional --fit exponential "
            "--out cli_vario.csv") == 0);
  const std::string vario = slurp("cli_vario.csv");
  CHECK(vario.find("bin_center,gamma,pairs") != std::string::npos);

  cleanup({"cli_curves.csv", "cli_mu.csv", "cli_vals.csv", "cli_comps.csv", "cli_vario.csv"});
}

TEST_CASE("descale fits and inverts the latitudinal trend") {
  CHECK(run("simulate --kind mean --mean fourier --n 16 --grid 60 --seed 9 "
            "--out cli_raw.csv") == 0);
  // impose a known trend by descaling with the inverse model first
  CHECK(run("descale --in cli_raw.csv --fit --out cli_flat.csv --out-model cli_model.json")
        == 0);
  CHECK(exists("cli_flat.csv"));
  const std::string model = slurp("cli_model.json");
  CHECK(model.find("\"kind\": \"scale_model\"") != std::string::npos);
  cleanup({"cli_raw.csv", "cli_flat.csv", "cli_model.json"});
}

TEST_CASE("missing locations are a config error") {
  {
    std::ofstream out("cli_nolocs.csv");
    out << "t_1,t_2\n0.5,0.25\n0.1,0.2\n";
  }
  CHECK(run("mean --in cli_nolocs.csv --method simple --out cli_out.csv") == 2);
  cleanup({"cli_nolocs.csv", "cli_out.csv"});
}

TEST_CASE("study accepts a JSON config file with flag overrides") {
  {
    std::ofstream cfg("cli_study_cfg.json");
    cfg << "{\"kind\": \"mean\", \"n\": 16, \"reps\": 8, \"grid\": 60, \"seed\": 7,\n"
        << " \"out\": \"cli_cfg_mean.csv\"}\n";
  }
  CHECK(run("study --config cli_study_cfg.json") == 0);
  REQUIRE(exists("cli_cfg_mean.csv"));
  const std::string from_config = slurp("cli_cfg_mean.csv");

  // identical to the pure-flag invocation
  CHECK(run("study --kind mean --n 16 --reps 8 --grid 60 --seed 7 --out cli_cfg_mean2.csv")
        == 0);
  CHECK(slurp("cli_cfg_mean2.csv") == from_config);

  // flags override config values
  CHECK(run("study --config cli_study_cfg.json --seed 8 --out cli_cfg_mean3.csv") == 0);
  CHECK(slurp("cli_cfg_mean3.csv") != from_config);

  CHECK(run("study --config cli_missing.json") == 2);
  cleanup({"cli_study_cfg.json", "cli_cfg_mean.csv", "cli_cfg_mean2.csv", "cli_cfg_mean3.csv"});
}

TEST_CASE("SPATFDA_SEED env var is the seed fallback") {
  const std::string invocation =
      "simulate --kind mean --n 6 --grid 24 --out cli_env.csv";
  setenv("SPATFDA_SEED", "42", 1);
  CHECK(run(invocation) == 0);
  const std::string a = slurp("cli_env.csv");
  CHECK(run(invocation) == 0);
  CHECK(slurp("cli_env.csv") == a);
  setenv("SPATFDA_SEED", "43", 1);
  CHECK(run(invocation) == 0);
  CHECK(slurp("cli_env.csv") != a);
  unsetenv("SPATFDA_SEED");
  cleanup({"cli_env.csv"});
}
