#include "noiseforge/device.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "noiseforge/parallel.hpp"

namespace noiseforge {

namespace {

// Two-qubit Pauli as dressing gates: pi rotations about the letter axes.
void append_pauli_gates(std::vector<GateOp>& gates, const std::string& word, int q0, int q1) {
  constexpr double kPi = std::numbers::pi;
  const int qubits[2] = {q0, q1};
  for (int j = 0; j < 2; ++j) {
    switch (word[j]) {
      case 'X': gates.push_back(GateOp::rx(qubits[j], kPi)); break;
      case 'Y': gates.push_back(GateOp::ry(qubits[j], kPi)); break;
      case 'Z': gates.push_back(GateOp::rz(qubits[j], kPi)); break;
      default: break;
    }
  }
}

// Sandwich every twirl-group CNOT between P and P' = CNOT P CNOT, with the
// dressing index per position supplied by the caller.
TrotterCircuit dress_with(const TrotterCircuit& circuit, const std::vector<int>& dressing) {
  TrotterCircuit out;
  out.n = circuit.n;
  out.dt = circuit.dt;
  out.resets = circuit.resets;

  std::vector<int> group_of(circuit.gates.size(), -1);
  for (size_t g = 0; g < circuit.cnot_layers.size(); ++g)
    for (int idx : circuit.cnot_layers[g]) group_of[idx] = static_cast<int>(g);

  for (size_t i = 0; i < circuit.gates.size(); ++i) {
    const GateOp& gate = circuit.gates[i];
    if (group_of[i] < 0 || gate.kind != GateKind::Cnot) {
      out.gates.push_back(gate);
      continue;
    }
    const std::string label = pauli_label_of_index(dressing[group_of[i]], 2);
    const PauliString local =
        PauliString::from_label(label).embedded(circuit.n, std::array{gate.q0, gate.q1});
    const PauliString compensating = clifford_conjugate(gate, local);
    append_pauli_gates(out.gates, label, gate.q0, gate.q1);
    out.cnot_layers.push_back({static_cast<int>(out.gates.size())});
    out.gates.push_back(gate);
    const std::string comp{compensating.letter(gate.q0), compensating.letter(gate.q1)};
    append_pauli_gates(out.gates, comp, gate.q0, gate.q1);
  }
  return out;
}

Eigen::MatrixXcd kick_matrix(int n, int q0, int q1, double theta) {
  // exp(-i theta/2 Z(x)Z) over-rotation attached after a CNOT.
  Eigen::Matrix4cd zz = Eigen::Matrix4cd::Zero();
  const std::complex<double> em = std::exp(std::complex<double>(0, -theta / 2.0));
  const std::complex<double> ep = std::exp(std::complex<double>(0, theta / 2.0));
  zz(0, 0) = em;
  zz(1, 1) = ep;
  zz(2, 2) = ep;
  zz(3, 3) = em;
  return embed_two_qubit(zz, n, q0, q1);
}

void sample_counts(std::vector<int64_t>& counts, const std::vector<double>& populations,
                   long shots, double readout_error, int n, std::mt19937_64& rng) {
  // Inverse-CDF draws keep the output independent of the standard library.
  std::vector<double> cdf(populations.size());
  double acc = 0.0;
  for (size_t j = 0; j < populations.size(); ++j) {
    acc += std::max(0.0, populations[j]);
    cdf[j] = acc;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (long s = 0; s < shots; ++s) {
    const double u = unit(rng) * acc;
    size_t j = 0;
    while (j + 1 < cdf.size() && u > cdf[j]) ++j;
    uint64_t outcome = j;
    if (readout_error > 0.0) {
      for (int q = 0; q < n; ++q)
        if (unit(rng) < readout_error) outcome ^= (1ull << (n - 1 - q));
    }
    ++counts[outcome];
  }
}

}  // namespace

Eigen::MatrixXcd noisy_layer_unitary(const TrotterCircuit& c, double kick_theta) {
  const int64_t dim = int64_t{1} << c.n;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& g : c.gates) {
    u = gate_matrix(g, c.n) * u;
    if (kick_theta != 0.0 && g.kind == GateKind::Cnot)
      u = kick_matrix(c.n, g.q0, g.q1, kick_theta) * u;
  }
  return u;
}

void DeviceModel::validate() const {
  if (n < 1) throw std::invalid_argument("device needs at least one qubit");
  for (const auto& ch : channels) {
    ch.validate();
    for (int q : ch.subgroup())
      if (q < 0 || q >= n) throw std::invalid_argument("channel subgroup out of range");
    if (ch.width() == 2) {
      const auto& s = ch.subgroup();
      if (std::abs(s[0] - s[1]) != 1)
        throw std::invalid_argument("pair channels must act on adjacent qubits");
    }
  }
  for (size_t a = 0; a < channels.size(); ++a)
    for (size_t b = a + 1; b < channels.size(); ++b)
      if (channels[a].subgroup() == channels[b].subgroup())
        throw std::invalid_argument("duplicate channel subgroup in tiling");
  if (!(reset_error >= 0.0 && reset_error <= 1.0))
    throw std::invalid_argument("reset failure probability out of [0,1]");
  if (!(readout_error >= 0.0 && readout_error <= 1.0))
    throw std::invalid_argument("readout error out of [0,1]");
}

std::vector<std::vector<int>> default_pair_tiling(int n) {
  std::vector<std::vector<int>> tiling;
  for (int m = 0; m + 1 < n; m += 2) tiling.push_back({m, m + 1});
  for (int m = 1; m + 1 < n; m += 2) tiling.push_back({m, m + 1});
  if (tiling.empty()) tiling.push_back({0});
  return tiling;
}

TrotterCircuit dress_circuit(const TrotterCircuit& circuit, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dist(0, 15);
  std::vector<int> dressing(circuit.cnot_layers.size());
  for (auto& d : dressing) d = dist(rng);
  return dress_with(circuit, dressing);
}

std::vector<TrotterCircuit> randomized_compile(const TrotterCircuit& circuit, int copies,
                                               uint64_t seed) {
  if (copies < 1) throw std::invalid_argument("randomized_compile: need at least one copy");

  // Balanced design: each CNOT position cycles through the 16 two-qubit
  // Paulis as evenly as the copy count allows, in shuffled order.
  const int positions = static_cast<int>(circuit.cnot_layers.size());
  std::mt19937_64 rng = rng_stream(seed, 0x7c1);
  std::vector<std::vector<int>> plan(positions);
  for (int p = 0; p < positions; ++p) {
    auto& list = plan[p];
    list.reserve(copies);
    for (int c = 0; c < copies; ++c) list.push_back(c % 16);
    std::shuffle(list.begin(), list.end(), rng);
  }

  std::vector<TrotterCircuit> out;
  out.reserve(copies);
  for (int c = 0; c < copies; ++c) {
    std::vector<int> dressing(positions);
    for (int p = 0; p < positions; ++p) dressing[p] = plan[p][c];
    out.push_back(dress_with(circuit, dressing));
  }
  return out;
}

std::vector<std::vector<double>> ExecutionResult::populations() const {
  std::vector<std::vector<double>> out;
  if (!states.empty()) {
    out.reserve(states.size());
    for (const auto& s : states) out.push_back(s.populations());
    return out;
  }
  out.reserve(counts.size());
  for (const auto& c : counts) {
    std::vector<double> p(c.size());
    for (size_t j = 0; j < c.size(); ++j) p[j] = shots ? double(c[j]) / double(shots) : 0.0;
    out.push_back(std::move(p));
  }
  return out;
}

ExecutionResult execute(const TrotterCircuit& layer, int layers, const DeviceModel& model,
                        const DensityMatrix& initial, const ExecOptions& opts,
                        const InsertionSchedule* insertions,
                        const Eigen::MatrixXcd* layer_unitary) {
  model.validate();
  if (layer.n != model.n) throw std::invalid_argument("circuit and model qubit counts differ");
  if (initial.qubits() != model.n) throw std::invalid_argument("initial state dimension mismatch");
  if (layers < 1) throw std::invalid_argument("layer count must be positive");
  if (insertions && static_cast<int>(insertions->per_layer.size()) != layers)
    throw std::invalid_argument("insertion list length must equal the layer count");
  if (opts.mode == ExecMode::Sampled && opts.shots <= 0)
    throw std::invalid_argument("sampled mode needs a positive shot count");

  std::mt19937_64 rng = rng_stream(opts.seed ? opts.seed : model.seed, 0xd3);

  // Without twirling the layer unitary is the same every layer; cache it.
  Eigen::MatrixXcd cached;
  if (!opts.twirl)
    cached = layer_unitary ? *layer_unitary : noisy_layer_unitary(layer, model.coherent_theta);

  // Embed the channel words once; they are reused every layer.
  struct CompiledChannel {
    double identity_weight;
    std::vector<std::pair<double, PauliString>> terms;
  };
  std::vector<CompiledChannel> compiled;
  compiled.reserve(model.channels.size());
  for (const auto& ch : model.channels) {
    CompiledChannel c;
    c.identity_weight = ch.prob(0);
    for (int k = 1; k < ch.size(); ++k)
      if (ch.prob(k) != 0.0) c.terms.push_back({ch.prob(k), ch.embedded_word(k, model.n)});
    compiled.push_back(std::move(c));
  }
  Eigen::MatrixXcd channel_src;

  ExecutionResult result;
  result.shots = opts.shots;
  if (insertions) {
    result.pec_sign = insertions->sign;
    result.pec_weight = insertions->weight;
  }

  DensityMatrix rho = initial;
  auto record = [&](int d) {
    const bool final_point = d == layers;
    if (opts.mode == ExecMode::Exact) {
      if (!opts.record_series && !final_point) return;
      result.times.push_back(layer.dt * double(d));
      result.states.push_back(rho);
    } else {
      result.times.push_back(layer.dt * double(d));
      std::vector<int64_t> counts(size_t(1) << model.n, 0);
      sample_counts(counts, rho.populations(), opts.shots, model.readout_error, model.n, rng);
      result.counts.push_back(std::move(counts));
    }
  };

  record(0);
  for (int d = 0; d < layers; ++d) {
    if (opts.twirl) {
      apply_unitary(rho, noisy_layer_unitary(dress_circuit(layer, rng), model.coherent_theta));
    } else {
      apply_unitary(rho, cached);
    }
    for (const auto& c : compiled) {
      channel_src = rho.matrix();
      rho.matrix() *= c.identity_weight;
      for (const auto& [eps, word] : c.terms)
        accumulate_pauli_sandwich(rho.matrix(), channel_src, word, eps);
    }
    if (insertions && !insertions->per_layer[d].is_identity_word())
      apply_pauli(rho, insertions->per_layer[d]);
    for (const auto& slot : layer.resets) {
      ResetSpec spec;
      spec.qubit = slot.q0;
      spec.prob = slot.prob;
      spec.p_er = model.reset_error;
      spec.generalized = slot.kind == GateKind::GeneralizedReset;
      spec.pre = slot.pre;
      spec.post = slot.post;
      apply_reset_slot(rho, spec);
    }
    record(d + 1);
  }
  return result;
}

Measurement measure_pauli(const ExecutionResult& result, const DeviceModel& model,
                          const PauliString& observable, long shots, uint64_t seed) {
  if (observable.size() != model.n)
    throw std::invalid_argument("observable length mismatch");
  if (result.states.empty()) throw std::invalid_argument("measure_pauli needs exact-mode states");
  const DensityMatrix& rho = result.states.back();
  const double exact = rho.expectation(observable);
  if (shots <= 0) return {exact, 0.0};

  // Readout flips shrink the visible expectation per supported qubit.
  double visible = exact;
  if (model.readout_error > 0.0)
    visible *= std::pow(1.0 - 2.0 * model.readout_error, observable.weight());
  const double p_plus = std::clamp((1.0 + visible) / 2.0, 0.0, 1.0);
  std::mt19937_64 rng = rng_stream(seed, 0xa17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  long plus = 0;
  for (long s = 0; s < shots; ++s)
    if (unit(rng) < p_plus) ++plus;
  const double mean = 2.0 * double(plus) / double(shots) - 1.0;
  const double var = std::max(0.0, 1.0 - mean * mean);
  return {mean, std::sqrt(var / double(shots))};
}

}  // namespace noiseforge
