#include "noiseforge/trotter.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace noiseforge {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

int guarded_ceil(double v) {
  return static_cast<int>(std::ceil(v - std::abs(v) * 1e-12));
}

struct TermSupport {
  int weight = 0;
  int q[2] = {-1, -1};
  char letter[2] = {'I', 'I'};
};

TermSupport term_support(const PauliString& word) {
  TermSupport s;
  for (int m = 0; m < word.size(); ++m) {
    const char c = word.letter(m);
    if (c == 'I') continue;
    if (s.weight == 2) {
      s.weight = 3;  // too wide, caller rejects
      return s;
    }
    s.q[s.weight] = m;
    s.letter[s.weight] = c;
    ++s.weight;
  }
  return s;
}

void emit_basis_pre(std::vector<GateOp>& gates, int q, char letter) {
  if (letter == 'X') {
    gates.push_back(GateOp::hadamard(q));
  } else if (letter == 'Y') {
    gates.push_back(GateOp::rz(q, -kHalfPi));
    gates.push_back(GateOp::hadamard(q));
  }
}

void emit_basis_post(std::vector<GateOp>& gates, int q, char letter) {
  if (letter == 'X') {
    gates.push_back(GateOp::hadamard(q));
  } else if (letter == 'Y') {
    gates.push_back(GateOp::hadamard(q));
    gates.push_back(GateOp::rz(q, kHalfPi));
  }
}

void emit_term(TrotterCircuit& c, const Hamiltonian::Term& term, double dt_eff) {
  const TermSupport s = term_support(term.word);
  const double theta = 2.0 * term.coeff * dt_eff;
  if (s.weight == 0) return;  // identity term: global phase only
  if (s.weight == 1) {
    emit_basis_pre(c.gates, s.q[0], s.letter[0]);
    c.gates.push_back(GateOp::rz(s.q[0], theta));
    emit_basis_post(c.gates, s.q[0], s.letter[0]);
    return;
  }
  if (s.weight != 2) throw std::invalid_argument("Trotter layer: term acts on more than 2 qubits");
  if (s.q[1] != s.q[0] + 1)
    throw std::invalid_argument("Trotter layer: 2-qubit term couples non-adjacent qubits");

  emit_basis_pre(c.gates, s.q[0], s.letter[0]);
  emit_basis_pre(c.gates, s.q[1], s.letter[1]);
  c.cnot_layers.push_back({static_cast<int>(c.gates.size())});
  c.gates.push_back(GateOp::cnot(s.q[0], s.q[1]));
  c.gates.push_back(GateOp::rz(s.q[1], theta));
  c.cnot_layers.push_back({static_cast<int>(c.gates.size())});
  c.gates.push_back(GateOp::cnot(s.q[0], s.q[1]));
  emit_basis_post(c.gates, s.q[0], s.letter[0]);
  emit_basis_post(c.gates, s.q[1], s.letter[1]);
}

}  // namespace

void TrotterPlan::validate() const {
  if (order != 1 && order != 2) throw std::invalid_argument("Trotter order must be 1 or 2");
  if (!(dt > 0.0)) throw std::invalid_argument("Trotter time-step must be positive");
  if (layers < 1) throw std::invalid_argument("layer count must be positive");
  if (lattice_dim != 1 && lattice_dim != 2)
    throw std::invalid_argument("lattice dimension must be 1 or 2");
}

int TrotterCircuit::cnot_count() const {
  int c = 0;
  for (const auto& g : gates)
    if (g.kind == GateKind::Cnot) ++c;
  return c;
}

TrotterCircuit build_trotter_layer(const Hamiltonian& h, const TrotterPlan& plan) {
  if (plan.order != 1 && plan.order != 2)
    throw std::invalid_argument("unsupported Trotter order");
  h.validate();

  TrotterCircuit c;
  c.n = h.n;
  c.dt = plan.dt;
  if (plan.order == 1) {
    for (const auto& t : h.terms) emit_term(c, t, plan.dt);
  } else {
    for (const auto& t : h.terms) emit_term(c, t, plan.dt / 2.0);
    for (auto it = h.terms.rbegin(); it != h.terms.rend(); ++it) emit_term(c, *it, plan.dt / 2.0);
  }
  return c;
}

Eigen::MatrixXcd circuit_unitary(const TrotterCircuit& c) {
  const int64_t dim = int64_t{1} << c.n;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& g : c.gates) {
    if (!g.is_unitary()) throw std::invalid_argument("circuit_unitary: reset slot in gate list");
    u = gate_matrix(g, c.n) * u;
  }
  return u;
}

int depth_estimate(double comm_norm, double total_time, double trotter_error, int order,
                   double constant) {
  if (!(comm_norm > 0.0) || !(total_time > 0.0) || !(trotter_error > 0.0) || !(constant > 0.0))
    throw std::invalid_argument("depth_estimate: inputs must be positive");
  if (order != 1 && order != 2) throw std::invalid_argument("depth_estimate: order must be 1 or 2");
  const double k = order;
  const double v = constant * std::pow(comm_norm, 1.0 / k) *
                   std::pow(total_time, 1.0 + 1.0 / k) / std::pow(trotter_error, 1.0 / k);
  return std::max(1, guarded_ceil(v));
}

int chain_depth_estimate(int n, int lattice_dim, double coupling, double energy,
                         double total_time, double trotter_error, double constant) {
  if (n < 1 || (lattice_dim != 1 && lattice_dim != 2))
    throw std::invalid_argument("chain_depth_estimate: bad lattice inputs");
  if (!(coupling > 0.0) || energy < 0.0 || !(total_time > 0.0) || !(trotter_error > 0.0))
    throw std::invalid_argument("chain_depth_estimate: inputs must be positive");
  const double v = constant * std::pow(double(n), lattice_dim) * coupling *
                   (coupling + energy) * total_time * total_time / trotter_error;
  return std::max(1, guarded_ceil(v));
}

double commutator_norm(const Hamiltonian& h, int order) {
  if (h.n > 6) throw std::invalid_argument("commutator_norm: dense evaluation capped at n=6");
  if (order != 1 && order != 2) throw std::invalid_argument("commutator_norm: order must be 1 or 2");
  h.validate();

  const int count = static_cast<int>(h.terms.size());
  std::vector<Eigen::MatrixXcd> dense(count);
  for (int j = 0; j < count; ++j) dense[j] = h.terms[j].coeff * h.terms[j].word.dense();

  auto spectral_norm = [](const Eigen::MatrixXcd& m) {
    return m.jacobiSvd().singularValues()(0);
  };

  double total = 0.0;
  for (int l1 = 0; l1 < count; ++l1) {
    for (int l2 = 0; l2 < count; ++l2) {
      const Eigen::MatrixXcd inner = dense[l2] * dense[l1] - dense[l1] * dense[l2];
      const double inner_scale = inner.cwiseAbs().maxCoeff();
      if (order == 1) {
        if (inner_scale > 0.0) total += spectral_norm(inner);
        continue;
      }
      if (inner_scale == 0.0) continue;
      for (int l3 = 0; l3 < count; ++l3) {
        const Eigen::MatrixXcd outer = dense[l3] * inner - inner * dense[l3];
        if (outer.cwiseAbs().maxCoeff() > 0.0) total += spectral_norm(outer);
      }
    }
  }
  return total;
}

std::vector<GateOp> ancilla_damping_block(int n, int system, int ancilla, double theta) {
  if (system == ancilla) throw std::invalid_argument("system and ancilla must differ");
  std::vector<GateOp> gates;
  gates.push_back(GateOp::ry(ancilla, theta / 2.0));
  gates.push_back(GateOp::cnot(system, ancilla));
  gates.push_back(GateOp::ry(ancilla, -theta / 2.0));
  gates.push_back(GateOp::cnot(system, ancilla));
  gates.push_back(GateOp::cnot(ancilla, system));
  for (const auto& g : gates) g.validate(n);
  return gates;
}

}  // namespace noiseforge
