#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "noiseforge/pauli.hpp"

namespace noiseforge {

// Full-register density matrix.  Qubit 0 is the most significant bit of the
// computational-basis index, so |1,0> on two qubits sits at index 2.
class DensityMatrix {
public:
  DensityMatrix() = default;
  explicit DensityMatrix(int n) : n_(n), mat_(Eigen::MatrixXcd::Zero(1ll << n, 1ll << n)) {}
  DensityMatrix(int n, Eigen::MatrixXcd m);

  static DensityMatrix computational(int n, uint64_t basis_index);
  static DensityMatrix from_statevector(int n, const Eigen::VectorXcd& psi);
  static DensityMatrix maximally_mixed(int n);
  // Product state with one letter per qubit: '0','1','+','-','r','l'
  // ('r'/'l' are the +i/-i eigenstates of Y).
  static DensityMatrix product_state(std::span<const char> letters);

  int qubits() const { return n_; }
  int64_t dim() const { return mat_.rows(); }
  const Eigen::MatrixXcd& matrix() const { return mat_; }
  Eigen::MatrixXcd& matrix() { return mat_; }

  double trace_real() const { return mat_.trace().real(); }
  double hermiticity_error() const;  // max-norm of rho - rho^dagger
  double min_eigenvalue() const;
  std::vector<double> populations() const;  // diagonal, real parts

  std::complex<double> expectation(const Eigen::MatrixXcd& op) const;
  double expectation(const PauliString& op) const;

  DensityMatrix partial_trace(std::span<const int> keep) const;

  void hermitize() { mat_ = ((mat_ + mat_.adjoint()) / 2.0).eval(); }

private:
  int n_ = 0;
  Eigen::MatrixXcd mat_;
};

// rho -> U rho U^dagger (dense).
void apply_unitary(DensityMatrix& rho, const Eigen::MatrixXcd& u);

// rho -> P rho P^dagger; the word's phase cancels.  O(dim^2).
void apply_pauli(DensityMatrix& rho, const PauliString& p);
DensityMatrix applied_pauli(const DensityMatrix& rho, const PauliString& p);

// dst += coeff * P src P^dagger in a single pass; the Monte Carlo hot path.
void accumulate_pauli_sandwich(Eigen::MatrixXcd& dst, const Eigen::MatrixXcd& src,
                               const PauliString& p, double coeff);

// rho -> sum_K (I (x) K (x) I) rho (...)^dagger for single-qubit Kraus ops.
void apply_single_qubit_kraus(DensityMatrix& rho, int qubit,
                              std::span<const Eigen::Matrix2cd> kraus);

// Embed a single-qubit operator at `qubit` of an n-qubit register.
Eigen::MatrixXcd embed_one_qubit(const Eigen::Matrix2cd& op, int n, int qubit);
// Embed a two-qubit operator at adjacent-or-not qubits (q0, q1), q0 != q1.
Eigen::MatrixXcd embed_two_qubit(const Eigen::Matrix4cd& op, int n, int q0, int q1);

}  // namespace noiseforge
