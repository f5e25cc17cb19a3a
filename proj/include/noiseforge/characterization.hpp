#pragma once

#include <cstdint>
#include <vector>

#include "noiseforge/channels.hpp"
#include "noiseforge/device.hpp"
#include "noiseforge/trotter.hpp"

namespace noiseforge {

struct CBConfig {
  std::vector<int> depths{2, 4, 8, 16};
  long shots = 0;             // 0 = exact expectations
  std::vector<int> subgroup;  // probed qubits, width K <= 3
  std::vector<int> probes;    // channel indices; empty = all 4^K - 1
  int twirl_copies = 1;       // R
  uint64_t seed = 0;

  void validate() const;
};

struct ProbeFit {
  int index = 0;              // channel index of the probe word
  double fidelity = 1.0;      // fitted decay base f_a
  double amplitude = 1.0;     // fitted A_a
  double residual = 0.0;      // RMS log residual
  double stderr = 0.0;        // propagated fit error on f_a
  bool crossed_zero = false;  // decay hit or crossed zero
  std::vector<double> decay;  // measured <a>(m) per depth
  std::vector<double> decay_stderr;
};

struct FidelityEstimate {
  std::vector<int> subgroup;
  std::vector<int> depths;
  std::vector<ProbeFit> probes;

  const ProbeFit& probe(int index) const;
};

// Zero every Z-rotation angle, keeping the CNOT skeleton; the result is a
// Clifford circuit logically equal to the identity.
TrotterCircuit make_clifford_identity_variant(const TrotterCircuit& layer);

// f_a = sum_k eps_k * commutes(a, k) over the subgroup words.
double pauli_fidelity(const PauliChannel& ch, const PauliString& probe);

// Depth-m decay experiments on the identity variant: prepare an eigenstate
// of each probe, run V^m under the model with twirling, fit A f^m.
FidelityEstimate run_cycle_benchmark(const DeviceModel& model, const TrotterCircuit& layer_v,
                                     const CBConfig& cfg);

// eps_k = 4^-K sum_a commutes(a,k) f_a, clamped to non-negative values and
// renormalized.
PauliChannel reconstruct_error_probabilities(const FidelityEstimate& fit, int width);

}  // namespace noiseforge
