#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace noiseforge {

// Pauli word over n qubits with a four-unit phase, stored as two bitmasks
// plus a power of i.  The operator represented is  i^phase_exp * X^x * Z^z,
// with the bit for qubit m placed at position (n-1-m) so that masks line up
// with computational-basis indices (qubit 0 is the most significant bit).
class PauliString {
public:
  PauliString() = default;

  static PauliString identity(int n);
  // word: letters from {I,X,Y,Z}, e.g. "XZ"; phase_exp counts powers of i
  // applied on top of the plain letter product.
  static PauliString from_label(std::string_view word, int phase_exp = 0);
  // Single non-identity letter on `qubit` of an n-qubit register.
  static PauliString single(int n, int qubit, char letter);

  int size() const { return n_; }
  char letter(int qubit) const;
  std::string label() const;           // letters only, no phase
  std::complex<double> phase() const;  // phase of the word relative to the plain letter product
  int phase_exponent() const { return e_; }

  uint64_t x_mask() const { return x_; }
  uint64_t z_mask() const { return z_; }

  bool is_identity_word() const { return x_ == 0 && z_ == 0; }
  int weight() const;  // number of non-identity letters

  // Group product with exact four-unit phase tracking.
  PauliString operator*(const PauliString& rhs) const;
  bool operator==(const PauliString& rhs) const {
    return n_ == rhs.n_ && x_ == rhs.x_ && z_ == rhs.z_ && e_ == rhs.e_;
  }
  bool same_word(const PauliString& rhs) const {
    return n_ == rhs.n_ && x_ == rhs.x_ && z_ == rhs.z_;
  }

  // +1 if the words commute, -1 if they anticommute.
  int commute_sign(const PauliString& rhs) const;

  // Widen a K-qubit word onto an n-qubit register at the given qubit indices.
  PauliString embedded(int n, std::span<const int> subgroup) const;

  Eigen::MatrixXcd dense() const;

  // P|j> = phase * |j ^ x_mask>; returns the phase for basis index j.
  std::complex<double> basis_phase(uint64_t j) const;

private:
  PauliString(int n, uint64_t x, uint64_t z, int e) : n_(n), x_(x), z_(z), e_(e & 3) {}

  int n_ = 0;
  uint64_t x_ = 0, z_ = 0;
  int e_ = 0;  // power of i in the canonical X^x Z^z form
};

// Free-function spellings used throughout the library.
PauliString pauli_mul(const PauliString& a, const PauliString& b);
int commutes(const PauliString& a, const PauliString& b);

// All 4^n words of width n in base-4 order (I=0, X=1, Y=2, Z=3, first qubit
// is the most significant digit).  Index <-> label helpers share the order.
std::vector<PauliString> all_pauli_words(int n);
int pauli_index(const PauliString& word);
std::string pauli_label_of_index(int index, int n);
int pauli_index_of_label(std::string_view label);

}  // namespace noiseforge
