#pragma once

#include <Eigen/Dense>

#include "noiseforge/pauli.hpp"

namespace noiseforge {

enum class GateKind { RotZ, RotX, RotY, Hadamard, Cnot, Reset, GeneralizedReset };

// One circuit operation.  Rotations follow R(theta) = exp(-i theta P / 2).
// Reset kinds are channel slots: `prob` is the per-layer application
// probability; generalized resets carry the basis unitaries U (pre) and
// V (post) of the |Psi><Phi| construction.
struct GateOp {
  GateKind kind = GateKind::RotZ;
  int q0 = 0;         // rotation/Hadamard/reset target; CNOT control
  int q1 = -1;        // CNOT target
  double angle = 0.0;
  double prob = 1.0;
  Eigen::Matrix2cd pre = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd post = Eigen::Matrix2cd::Identity();

  static GateOp rz(int q, double theta);
  static GateOp rx(int q, double theta);
  static GateOp ry(int q, double theta);
  static GateOp hadamard(int q);
  static GateOp cnot(int control, int target);
  static GateOp reset(int q, double prob);
  static GateOp generalized_reset(int q, double prob, const Eigen::Matrix2cd& u,
                                  const Eigen::Matrix2cd& v);

  bool is_unitary() const { return kind != GateKind::Reset && kind != GateKind::GeneralizedReset; }
  bool is_clifford() const;

  void validate(int n) const;  // operand indices in range and distinct
};

// Dense matrix of a unitary gate embedded in an n-qubit register.
Eigen::MatrixXcd gate_matrix(const GateOp& g, int n);
Eigen::Matrix2cd rotation_matrix(GateKind axis, double theta);

// Signed conjugation  G P G^dagger  for the supported Clifford gates:
// Hadamard, CNOT and quarter-turn Z rotations.  Throws for anything else.
PauliString clifford_conjugate(const GateOp& g, const PauliString& p);

}  // namespace noiseforge
