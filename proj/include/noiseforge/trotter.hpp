#pragma once

#include <vector>

#include <Eigen/Dense>

#include "noiseforge/gates.hpp"
#include "noiseforge/hamiltonian.hpp"

namespace noiseforge {

// Product-formula plan: order, time-step and layer count, plus the planning
// inputs used by the depth estimates.
struct TrotterPlan {
  int order = 1;              // k in {1, 2}
  double dt = 0.0;            // Trotter time-step
  int layers = 1;             // D
  double trotter_error = 0.0; // target decomposition error
  double comm_norm = 0.0;     // alpha_comm
  int lattice_dim = 1;        // d in {1, 2}

  double total_time() const { return dt * layers; }
  void validate() const;
};

// One Trotter layer as an ordered gate list.  `cnot_layers` groups the CNOT
// gate indices that act as one twirl target; `resets` are channel slots
// applied at the end of the layer.
struct TrotterCircuit {
  int n = 0;
  double dt = 0.0;
  std::vector<GateOp> gates;
  std::vector<std::vector<int>> cnot_layers;
  std::vector<GateOp> resets;

  int cnot_count() const;
};

// Emit the order-1 or order-2 layer for a Hamiltonian whose terms act on at
// most two adjacent qubits.  Every parameterized gate is a Z rotation; X and
// Y exponentials are conjugated into the Z axis by fixed Cliffords.
TrotterCircuit build_trotter_layer(const Hamiltonian& h, const TrotterPlan& plan);

// Dense unitary of the gate list (reset slots must be absent).
Eigen::MatrixXcd circuit_unitary(const TrotterCircuit& c);

// D = ceil(constant * alpha_comm^{1/k} t^{1+1/k} / eps^{1/k}).
int depth_estimate(double comm_norm, double total_time, double trotter_error, int order,
                   double constant = 1.0);

// D = ceil(constant * n^d J (J+E) t^2 / eps) for chain (d=1) or grid (d=2).
int chain_depth_estimate(int n, int lattice_dim, double coupling, double energy,
                         double total_time, double trotter_error, double constant = 1.0);

// Sum of spectral norms of (order+1)-fold nested commutators over all term
// tuples, evaluated densely; n is capped at 6.
double commutator_norm(const Hamiltonian& h, int order);

// Interaction block that damps `system` via an ancilla: a controlled-Y
// rotation folded into CNOTs plus a final CNOT back, with damping
// probability sin^2(theta/2) once the ancilla is traced out.
std::vector<GateOp> ancilla_damping_block(int n, int system, int ancilla, double theta);

}  // namespace noiseforge
