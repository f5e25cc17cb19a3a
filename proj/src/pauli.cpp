#include "noiseforge/pauli.hpp"

#include <bit>
#include <stdexcept>

namespace noiseforge {

namespace {

constexpr std::complex<double> kPhases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

int letter_bits(char c, bool& x, bool& z) {
  switch (c) {
    case 'I': x = false; z = false; return 0;
    case 'X': x = true;  z = false; return 0;
    case 'Y': x = true;  z = true;  return 1;  // Y = i X Z
    case 'Z': x = false; z = true;  return 0;
    default:
      throw std::invalid_argument(std::string("invalid Pauli letter '") + c + "'");
  }
}

}  // namespace

PauliString PauliString::identity(int n) {
  if (n < 1 || n > 63) throw std::invalid_argument("qubit count out of range");
  return PauliString(n, 0, 0, 0);
}

PauliString PauliString::from_label(std::string_view word, int phase_exp) {
  const int n = static_cast<int>(word.size());
  if (n < 1 || n > 63) throw std::invalid_argument("word length out of range");
  uint64_t x = 0, z = 0;
  int e = phase_exp;
  for (int m = 0; m < n; ++m) {
    bool bx = false, bz = false;
    e += letter_bits(word[m], bx, bz);
    const uint64_t bit = 1ull << (n - 1 - m);
    if (bx) x |= bit;
    if (bz) z |= bit;
  }
  return PauliString(n, x, z, e);
}

PauliString PauliString::single(int n, int qubit, char letter) {
  if (qubit < 0 || qubit >= n) throw std::invalid_argument("qubit index out of range");
  std::string word(n, 'I');
  word[qubit] = letter;
  return from_label(word);
}

char PauliString::letter(int qubit) const {
  if (qubit < 0 || qubit >= n_) throw std::invalid_argument("qubit index out of range");
  const uint64_t bit = 1ull << (n_ - 1 - qubit);
  const bool bx = x_ & bit, bz = z_ & bit;
  if (bx && bz) return 'Y';
  if (bx) return 'X';
  if (bz) return 'Z';
  return 'I';
}

std::string PauliString::label() const {
  std::string out(n_, 'I');
  for (int m = 0; m < n_; ++m) out[m] = letter(m);
  return out;
}

std::complex<double> PauliString::phase() const {
  // Phase relative to the plain product of letters (each Y carrying its own i).
  const int y_count = std::popcount(x_ & z_);
  return kPhases[((e_ - y_count) % 4 + 4) % 4];
}

int PauliString::weight() const { return std::popcount(x_ | z_); }

PauliString PauliString::operator*(const PauliString& rhs) const {
  if (n_ != rhs.n_) throw std::invalid_argument("pauli_mul: word length mismatch");
  // (X^a Z^b)(X^c Z^d) = (-1)^{b.c} X^{a^c} Z^{b^d}
  const int swaps = std::popcount(z_ & rhs.x_);
  return PauliString(n_, x_ ^ rhs.x_, z_ ^ rhs.z_, e_ + rhs.e_ + 2 * swaps);
}

int PauliString::commute_sign(const PauliString& rhs) const {
  if (n_ != rhs.n_) throw std::invalid_argument("commutes: word length mismatch");
  const int par = (std::popcount(x_ & rhs.z_) + std::popcount(z_ & rhs.x_)) & 1;
  return par ? -1 : 1;
}

PauliString PauliString::embedded(int n, std::span<const int> subgroup) const {
  if (static_cast<int>(subgroup.size()) != n_)
    throw std::invalid_argument("embedded: subgroup size does not match word length");
  std::string word(n, 'I');
  for (int j = 0; j < n_; ++j) {
    const int q = subgroup[j];
    if (q < 0 || q >= n) throw std::invalid_argument("embedded: qubit index out of range");
    if (word[q] != 'I') throw std::invalid_argument("embedded: repeated qubit in subgroup");
    word[q] = letter(j);
  }
  PauliString out = from_label(word);
  out.e_ = (out.e_ + e_ - std::popcount(x_ & z_)) & 3;  // carry the original phase
  return out;
}

std::complex<double> PauliString::basis_phase(uint64_t j) const {
  const int zpar = std::popcount(z_ & j) & 1;
  return kPhases[(e_ + 2 * zpar) & 3];
}

Eigen::MatrixXcd PauliString::dense() const {
  const int64_t dim = int64_t{1} << n_;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (int64_t j = 0; j < dim; ++j) m(j ^ x_, j) = basis_phase(j);
  return m;
}

PauliString pauli_mul(const PauliString& a, const PauliString& b) { return a * b; }

int commutes(const PauliString& a, const PauliString& b) { return a.commute_sign(b); }

std::vector<PauliString> all_pauli_words(int n) {
  const int count = 1 << (2 * n);
  std::vector<PauliString> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) out.push_back(PauliString::from_label(pauli_label_of_index(k, n)));
  return out;
}

int pauli_index(const PauliString& word) {
  static constexpr int digit_of[4] = {0, 1, 3, 2};  // (x,z) bits -> I,X,Z,Y
  int idx = 0;
  for (int m = 0; m < word.size(); ++m) {
    const uint64_t bit = 1ull << (word.size() - 1 - m);
    const int xz = (word.x_mask() & bit ? 1 : 0) | (word.z_mask() & bit ? 2 : 0);
    idx = idx * 4 + digit_of[xz];
  }
  return idx;
}

std::string pauli_label_of_index(int index, int n) {
  static constexpr char letters[4] = {'I', 'X', 'Y', 'Z'};
  if (index < 0 || index >= (1 << (2 * n)))
    throw std::invalid_argument("pauli index out of range");
  std::string word(n, 'I');
  for (int m = n - 1; m >= 0; --m) {
    word[m] = letters[index & 3];
    index >>= 2;
  }
  return word;
}

int pauli_index_of_label(std::string_view label) {
  int idx = 0;
  for (char c : label) {
    int d;
    switch (c) {
      case 'I': d = 0; break;
      case 'X': d = 1; break;
      case 'Y': d = 2; break;
      case 'Z': d = 3; break;
      default: throw std::invalid_argument("invalid Pauli label");
    }
    idx = idx * 4 + d;
  }
  return idx;
}

}  // namespace noiseforge
