#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "noiseforge/channels.hpp"
#include "noiseforge/device.hpp"
#include "noiseforge/hamiltonian.hpp"
#include "noiseforge/pec.hpp"

namespace noiseforge {

enum class RunMode { Characterize, Plan, Simulate, Mitigate, Cost };

struct ConfigError {
  std::string path;     // dotted locator, e.g. device.channels[0].eps.XX
  std::string message;
};

// Thrown by parse_config with every violation found, not just the first.
struct ConfigException : std::runtime_error {
  explicit ConfigException(std::vector<ConfigError> errors);
  std::vector<ConfigError> errors;
};

struct HamiltonianBlock {
  std::string type;  // chain | tfim
  int n = 0;
  std::vector<double> site_energies;  // chain
  std::vector<double> couplings;      // chain
  double coupling = 0.0;              // tfim J
  double field = 0.0;                 // tfim h

  Hamiltonian build() const;
};

// Per-channel string->value maps with an optional "default" key.
struct StringRateMap {
  std::vector<int> subgroup;
  std::map<std::string, double> values;
  double fallback = 0.0;

  std::vector<double> expand(int width) const;  // indexed like the channel
};

struct PecBlock {
  std::optional<double> uniform_r;
  std::vector<StringRateMap> r_maps;        // per subgroup
  std::vector<StringRateMap> target_rates;  // per subgroup
  long samples = 0;                         // 0 = auto ceil(90 C_tot^2)
  std::string plan_file;                    // reuse a stored plan
};

struct CBBlock {
  std::vector<int> depths{2, 4, 8, 16};
  long shots = 0;
  int twirl_copies = 1;
};

struct CostBlock {
  std::vector<int> qubit_counts;
  std::vector<double> factors;  // uniform r values
  std::vector<int> depths;
  double eps_per_string = 0.0;
};

struct RunBlock {
  double time = 0.0;
  uint64_t seed = 0;
  bool seed_given = false;
  long shots = 0;  // 0 = exact expectations
  bool reference = true;
  double rk4_dt = 0.0;  // 0 = dt/20
};

struct ExperimentConfig {
  RunMode mode = RunMode::Simulate;
  HamiltonianBlock hamiltonian;
  DeviceModel device;
  int trotter_order = 1;
  double trotter_dt = 0.0;  // 0 = planner chooses
  PecBlock pec;
  std::vector<double> damping_rates;  // per qubit, via reset slots
  CBBlock cb;
  CostBlock cost;
  RunBlock run;
  std::string raw_json;  // canonical dump for hashing
};

ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& base_dir);

// Channel spec files: {"subgroup": [...], "eps": {label: value, ...}}.
PauliChannel load_channel_spec(const std::string& path);
void save_channel_spec(const std::string& path, const PauliChannel& ch);
std::string channel_spec_json(const PauliChannel& ch);

void save_plan(const std::string& path, const MitigationPlan& plan);
MitigationPlan load_plan(const std::string& path);

}  // namespace noiseforge
