#pragma once

// Test-side oracles kept independent of the library's fast paths: dense
// matrix exponentials, Kronecker embeddings, superoperator and transfer
// matrix reconstruction.

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "noiseforge/density.hpp"
#include "noiseforge/pauli.hpp"

namespace oracle {

using Cmat = Eigen::MatrixXcd;

inline Cmat expm(const Cmat& m) { return m.exp(); }

inline Cmat pauli2(char c) {
  Cmat m(2, 2);
  const std::complex<double> i(0, 1);
  switch (c) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("bad letter");
  }
  return m;
}

// Dense word by Kronecker products, first letter leftmost.
inline Cmat pauli_word(const std::string& word) {
  Cmat m = pauli2(word[0]);
  for (size_t j = 1; j < word.size(); ++j)
    m = Eigen::kroneckerProduct(m, pauli2(word[j])).eval();
  return m;
}

// Column-stacked superoperator of a linear map on density matrices.
using MatMap = std::function<Cmat(const Cmat&)>;
inline Cmat superoperator(const MatMap& map, int64_t dim) {
  Cmat s(dim * dim, dim * dim);
  for (int64_t col = 0; col < dim; ++col) {
    for (int64_t row = 0; row < dim; ++row) {
      Cmat unit = Cmat::Zero(dim, dim);
      unit(row, col) = 1.0;
      const Cmat image = map(unit);
      for (int64_t c2 = 0; c2 < dim; ++c2)
        for (int64_t r2 = 0; r2 < dim; ++r2)
          s(c2 * dim + r2, col * dim + row) = image(r2, c2);
    }
  }
  return s;
}

// Pauli transfer matrix R_ab = Tr[P_a map(P_b)] / dim; Pauli channels are
// diagonal in this basis.
inline Eigen::MatrixXd transfer_matrix(const MatMap& map, int n) {
  const auto words = noiseforge::all_pauli_words(n);
  const int64_t dim = int64_t{1} << n;
  Eigen::MatrixXd r(words.size(), words.size());
  std::vector<Cmat> dense;
  dense.reserve(words.size());
  for (const auto& w : words) dense.push_back(w.dense());
  for (size_t b = 0; b < words.size(); ++b) {
    const Cmat image = map(dense[b]);
    for (size_t a = 0; a < words.size(); ++a)
      r(a, b) = ((dense[a] * image).trace() / double(dim)).real();
  }
  return r;
}

inline double max_offdiagonal(const Eigen::MatrixXd& m) {
  double v = 0.0;
  for (Eigen::Index a = 0; a < m.rows(); ++a)
    for (Eigen::Index b = 0; b < m.cols(); ++b)
      if (a != b) v = std::max(v, std::abs(m(a, b)));
  return v;
}

// Distance up to a global phase: min_phi || U - e^{i phi} V ||_max.
inline double phase_distance(const Cmat& u, const Cmat& v) {
  const std::complex<double> overlap = (u.adjoint() * v).trace();
  const std::complex<double> phase =
      std::abs(overlap) > 0 ? overlap / std::abs(overlap) : std::complex<double>(1, 0);
  return (u * phase - v).cwiseAbs().maxCoeff();
}

}  // namespace oracle
