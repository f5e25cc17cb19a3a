#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "noiseforge/config.hpp"
#include "noiseforge/runner.hpp"

using namespace noiseforge;

namespace {

namespace fs = std::filesystem;

std::string scratch_dir() {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() / ("noiseforge_test_" + std::to_string(counter++));
  fs::create_directories(dir);
  return dir.string();
}

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kSimulateConfig = R"({
  "mode": "simulate",
  "hamiltonian": {"type": "chain", "n": 2,
                  "site_energies": [121.5, 121.0], "couplings": [0.5]},
  "device": {"channels": [{"subgroup": [0, 1], "eps": {"XI": 0.004, "ZZ": 0.006}}]},
  "trotter": {"dt": 0.05},
  "run": {"time": 0.5, "seed": 3}
})";

}  // namespace

TEST_CASE("minimal simulate config populates defaults") {
  const ExperimentConfig cfg = parse_config_text(kSimulateConfig, ".");
  CHECK(cfg.mode == RunMode::Simulate);
  CHECK(cfg.trotter_order == 1);
  CHECK(cfg.device.reset_error == doctest::Approx(1e-3));
  CHECK(cfg.run.rk4_dt == 0.0);  // auto: dt/20
  CHECK(cfg.device.channels.size() == 1);
}

TEST_CASE("validation collects every violation with locators") {
  const char* broken = R"({
    "mode": "simulate",
    "hamiltonian": {"type": "chain", "n": 2,
                    "site_energies": [1.0], "couplings": []},
    "trotter": {"order": 3, "dt": 0.05},
    "run": {"time": -1, "shots": 100}
  })";
  try {
    parse_config_text(broken, ".");
    FAIL("expected a ConfigException");
  } catch (const ConfigException& e) {
    CHECK(e.errors.size() >= 4);
    bool saw_energies = false, saw_order = false, saw_seed = false, saw_time = false;
    for (const auto& err : e.errors) {
      if (err.path == "hamiltonian.site_energies") saw_energies = true;
      if (err.path == "trotter.order") saw_order = true;
      if (err.path == "run.seed") saw_seed = true;
      if (err.path == "run.time") saw_time = true;
    }
    CHECK(saw_energies);
    CHECK(saw_order);
    CHECK(saw_seed);
    CHECK(saw_time);
  }

  // a negative shot count is a range violation of its own
  const char* negative_shots = R"({
    "mode": "simulate",
    "hamiltonian": {"type": "chain", "n": 2,
                    "site_energies": [1.0, 2.0], "couplings": [0.5]},
    "trotter": {"dt": 0.05},
    "run": {"time": 1.0, "shots": -5, "seed": 1}
  })";
  try {
    parse_config_text(negative_shots, ".");
    FAIL("expected a ConfigException");
  } catch (const ConfigException& e) {
    bool saw_shots = false;
    for (const auto& err : e.errors)
      if (err.path == "run.shots") saw_shots = true;
    CHECK(saw_shots);
  }
}

TEST_CASE("fixed-step targets that exceed eps/dt are rejected by name") {
  const char* infeasible = R"({
    "mode": "mitigate",
    "hamiltonian": {"type": "chain", "n": 2,
                    "site_energies": [121.5, 121.0], "couplings": [0.5]},
    "device": {"channels": [{"subgroup": [0, 1], "eps": {"ZZ": 0.002}}]},
    "trotter": {"dt": 0.1},
    "pec": {"targets": [{"subgroup": [0, 1], "values": {"ZZ": 0.5}}]},
    "run": {"time": 1.0, "seed": 1}
  })";
  try {
    parse_config_text(infeasible, ".");
    FAIL("expected a ConfigException");
  } catch (const ConfigException& e) {
    REQUIRE(e.errors.size() >= 1);
    bool named = false;
    for (const auto& err : e.errors)
      if (err.path.find("ZZ") != std::string::npos) named = true;
    CHECK(named);
  }
}

TEST_CASE("channel spec files round trip") {
  const std::string dir = scratch_dir();
  const PauliChannel ch =
      PauliChannel::from_error_probs({0, 1}, {{"XI", 0.004}, {"YZ", 0.002}, {"ZZ", 0.011}});
  const std::string path = dir + "/channel.json";
  save_channel_spec(path, ch);
  const PauliChannel back = load_channel_spec(path);
  CHECK(back.subgroup() == ch.subgroup());
  for (int k = 0; k < 16; ++k) CHECK(back.prob(k) == ch.prob(k));
}

TEST_CASE("plan files reproduce quasi-probabilities bit for bit") {
  const PauliChannel ch = PauliChannel::from_error_probs({0}, {{"Z", 0.02}, {"X", 0.007}});
  std::vector<double> targets(4, 0.0);
  targets[pauli_index_of_label("Z")] = 0.11;
  targets[pauli_index_of_label("X")] = 0.03;
  const MitigationPlan plan = plan_decoherence_control({ch}, {targets}, 1.7);

  const std::string dir = scratch_dir();
  const std::string path = dir + "/plan.json";
  save_plan(path, plan);
  const MitigationPlan back = load_plan(path);
  CHECK(back.dt == plan.dt);
  CHECK(back.layers == plan.layers);
  CHECK(back.c_tot == plan.c_tot);
  REQUIRE(back.channels.size() == plan.channels.size());
  for (size_t c = 0; c < plan.channels.size(); ++c) {
    for (int k = 0; k < 4; ++k) {
      CHECK(back.channels[c].quasi.q[k] == plan.channels[c].quasi.q[k]);
      CHECK(back.channels[c].quasi.p[k] == plan.channels[c].quasi.p[k]);
      CHECK(back.channels[c].r[k] == plan.channels[c].r[k]);
    }
  }
}

TEST_CASE("simulate pipeline: deterministic csv with reference eta") {
  const ExperimentConfig cfg = parse_config_text(kSimulateConfig, ".");
  const std::string dir_a = scratch_dir();
  const std::string dir_b = scratch_dir();
  const PipelineResult a = run_pipeline(cfg, dir_a, false);
  const PipelineResult b = run_pipeline(cfg, dir_b, false);
  REQUIRE(!a.artifacts.empty());
  const std::string csv_a = read_all(a.artifacts[0]);
  const std::string csv_b = read_all(b.artifacts[0]);
  CHECK(csv_a == csv_b);
  CHECK(csv_a.find("time,observable_label,value,stderr,eta") == 0);
  CHECK(csv_a.find("# config_hash=") != std::string::npos);
  // eta column filled when the reference runs
  std::istringstream lines(csv_a);
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  std::getline(lines, line);
  CHECK(line.back() != ',');
}

TEST_CASE("zero-noise simulate reduces to pure Trotter evolution") {
  const char* clean = R"({
    "mode": "simulate",
    "hamiltonian": {"type": "chain", "n": 2,
                    "site_energies": [121.5, 121.0], "couplings": [0.5]},
    "trotter": {"dt": 0.05},
    "run": {"time": 0.5, "seed": 3}
  })";
  const ExperimentConfig cfg = parse_config_text(clean, ".");
  const std::string dir = scratch_dir();
  const PipelineResult result = run_pipeline(cfg, dir, false);
  const std::string csv = read_all(result.artifacts[0]);

  // emitted populations equal the noiseless trotterized propagation exactly
  const Hamiltonian h = cfg.hamiltonian.build();
  const TimeSeries ref = trotterized_lindblad(h, {}, {}, DensityMatrix::computational(2, 0b10),
                                              10, 0.05);
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  size_t row = 0;
  double max_gap = 0.0, max_eta = 0.0;
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::string cell;
    std::vector<std::string> fields;
    while (std::getline(cells, cell, ',')) fields.push_back(cell);
    const size_t t = row / 4, j = row % 4;
    max_gap = std::max(max_gap,
                       std::abs(std::stod(fields[2]) - ref.states[t].populations()[j]));
    max_eta = std::max(max_eta, std::abs(std::stod(fields[4])));
    ++row;
  }
  CHECK(max_gap < 1e-12);
  // against the RK4 continuum the only residue is the Trotter splitting gap
  CHECK(max_eta < 1e-4);
}

TEST_CASE("plan then mitigate from the stored plan") {
  const std::string dir = scratch_dir();
  const std::string plan_cfg_text = R"({
    "mode": "plan",
    "hamiltonian": {"type": "chain", "n": 2,
                    "site_energies": [121.5, 121.0], "couplings": [0.5]},
    "device": {"channels": [{"subgroup": [0, 1], "eps": {"XI": 0.004, "ZZ": 0.006}}]},
    "pec": {"targets": [{"subgroup": [0, 1], "values": {"XI": 0.02, "ZZ": 0.03}}]},
    "run": {"time": 0.4, "seed": 1}
  })";
  const ExperimentConfig plan_cfg = parse_config_text(plan_cfg_text, dir);
  const PipelineResult planned = run_pipeline(plan_cfg, dir, false);
  REQUIRE(!planned.artifacts.empty());

  const std::string mit_text = std::string(R"({
    "mode": "mitigate",
    "hamiltonian": {"type": "chain", "n": 2,
                    "site_energies": [121.5, 121.0], "couplings": [0.5]},
    "device": {"channels": [{"subgroup": [0, 1], "eps": {"XI": 0.004, "ZZ": 0.006}}]},
    "pec": {"plan_file": "plan.json", "samples": 400},
    "run": {"time": 0.4, "seed": 5}
  })");
  const ExperimentConfig mit_cfg = parse_config_text(mit_text, dir);
  const PipelineResult mitigated = run_pipeline(mit_cfg, dir + "/out", false);
  REQUIRE(mitigated.artifacts.size() >= 2);
  // the re-saved plan carries identical quasi-probabilities
  const MitigationPlan original = load_plan(planned.artifacts[0]);
  const MitigationPlan reused = load_plan(mitigated.artifacts[1]);
  REQUIRE(original.channels.size() == reused.channels.size());
  for (size_t c = 0; c < original.channels.size(); ++c)
    for (size_t k = 0; k < original.channels[c].quasi.q.size(); ++k)
      CHECK(original.channels[c].quasi.q[k] == reused.channels[c].quasi.q[k]);
}

TEST_CASE("cost pipeline emits a monotone log-linear table") {
  const char* cost_cfg = R"({
    "mode": "cost",
    "cost": {"n": [2, 3, 4], "r": [1.0], "depths": [10, 20, 40],
             "eps_per_string": 0.002},
    "run": {"seed": 0}
  })";
  const ExperimentConfig cfg = parse_config_text(cost_cfg, ".");
  const std::string dir = scratch_dir();
  const PipelineResult result = run_pipeline(cfg, dir, true);
  const std::string csv = read_all(result.artifacts[0]);
  CHECK(csv.find("n,D,r,epsilon_r,C_iter,C_tot,M_required") == 0);

  // parse C_tot per row; monotone in n at fixed D, log-linear in D
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  std::getline(lines, line);
  std::map<std::pair<int, int>, double> c_tot;  // (n, D) -> value
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::string cell;
    std::vector<std::string> row;
    while (std::getline(cells, cell, ',')) row.push_back(cell);
    c_tot[{std::stoi(row[0]), std::stoi(row[1])}] = std::stod(row[5]);
  }
  for (int depth : {10, 20, 40}) {
    CHECK(c_tot[{2, depth}] < c_tot[{3, depth}]);
    CHECK(c_tot[{3, depth}] < c_tot[{4, depth}]);
  }
  for (int n : {2, 3, 4}) {
    const double ratio1 = std::log(c_tot[{n, 20}]) / std::log(c_tot[{n, 10}]);
    CHECK(ratio1 == doctest::Approx(2.0).epsilon(1e-9));
  }
  // an svg artifact was produced
  bool saw_svg = false;
  for (const auto& artifact : result.artifacts)
    if (artifact.find(".svg") != std::string::npos) saw_svg = true;
  CHECK(saw_svg);
}

TEST_CASE("characterize pipeline recovers the injected channel spec") {
  const std::string dir = scratch_dir();
  const char* cfg_text = R"({
    "mode": "characterize",
    "hamiltonian": {"type": "chain", "n": 2,
                    "site_energies": [121.5, 121.0], "couplings": [0.5]},
    "device": {"channels": [{"subgroup": [0, 1],
                             "eps": {"XI": 0.004, "IZ": 0.003, "ZZ": 0.006}}]},
    "trotter": {"dt": 0.05},
    "run": {"seed": 2}
  })";
  const ExperimentConfig cfg = parse_config_text(cfg_text, dir);
  const PipelineResult result = run_pipeline(cfg, dir, false);
  REQUIRE(result.artifacts.size() >= 3);
  const std::string channels = read_all(result.artifacts[2]);
  CHECK(channels.find("\"XI\"") != std::string::npos);
  CHECK(channels.find("0.004") != std::string::npos);
  CHECK(channels.find("\"ZZ\"") != std::string::npos);
}
