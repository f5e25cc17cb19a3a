#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "noiseforge/channels.hpp"
#include "noiseforge/density.hpp"
#include "noiseforge/trotter.hpp"

namespace noiseforge {

// Noisy-device model: per-layer stochastic Pauli channels on a subgroup
// tiling, an optional coherent ZZ over-rotation after every CNOT, reset
// failure probability and per-qubit readout flips.
struct DeviceModel {
  int n = 0;
  std::vector<PauliChannel> channels;
  double coherent_theta = 0.0;
  double reset_error = 1e-3;
  double readout_error = 0.0;
  uint64_t seed = 0;

  void validate() const;
};

// Even bonds first, then odd bonds; n-1 pair subgroups covering every bond.
std::vector<std::vector<int>> default_pair_tiling(int n);

enum class ExecMode { Exact, Sampled };

struct ExecOptions {
  ExecMode mode = ExecMode::Exact;
  long shots = 0;           // per time point in sampled mode
  bool twirl = false;       // fresh Pauli dressing around every CNOT, per layer
  uint64_t seed = 0;
  bool record_series = true;  // keep rho after every layer (exact mode)
};

// Per-sample PEC insertion schedule.
struct InsertionSchedule {
  std::vector<PauliString> per_layer;
  std::vector<int> layer_sign;      // product of subgroup signs in that layer
  std::vector<double> layer_weight; // product of subgroup C_mit in that layer
  int sign = 1;                     // product over all layers
  double weight = 1.0;              // C_tot
};

struct ExecutionResult {
  std::vector<double> times;
  std::vector<DensityMatrix> states;             // exact mode
  std::vector<std::vector<int64_t>> counts;      // sampled mode, per time point
  long shots = 0;
  int pec_sign = 1;
  double pec_weight = 1.0;

  std::vector<std::vector<double>> populations() const;
};

// Dense layer unitary with the coherent kick attached after every CNOT.
Eigen::MatrixXcd noisy_layer_unitary(const TrotterCircuit& layer, double kick_theta);

// Runs D layers: layer unitary (optionally twirled, with the coherent kick
// attached after every CNOT), then the model's noise channels, then the PEC
// insertion for that layer, then the layer's reset slots.  Callers looping
// over many samples may pass the precomputed untwirled layer unitary.
ExecutionResult execute(const TrotterCircuit& layer, int layers, const DeviceModel& model,
                        const DensityMatrix& initial, const ExecOptions& opts,
                        const InsertionSchedule* insertions = nullptr,
                        const Eigen::MatrixXcd* layer_unitary = nullptr);

// R logically-identical copies with balanced random Pauli dressings compiled
// around every CNOT group.
std::vector<TrotterCircuit> randomized_compile(const TrotterCircuit& circuit, int copies,
                                               uint64_t seed);

// Dress a single circuit with fresh uniform Pauli pairs (used per-sample).
TrotterCircuit dress_circuit(const TrotterCircuit& circuit, std::mt19937_64& rng);

struct Measurement {
  double value = 0.0;
  double stderr = 0.0;
};

// Exact mode: Tr[O rho] of the final state.  Sampled mode: shot mean of the
// +-1 outcomes with binomial stderr, including readout flips.
Measurement measure_pauli(const ExecutionResult& result, const DeviceModel& model,
                          const PauliString& observable, long shots, uint64_t seed);

}  // namespace noiseforge
