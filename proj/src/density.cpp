#include "noiseforge/density.hpp"

#include <cmath>
#include <stdexcept>

namespace noiseforge {

DensityMatrix::DensityMatrix(int n, Eigen::MatrixXcd m) : n_(n), mat_(std::move(m)) {
  const int64_t dim = int64_t{1} << n;
  if (mat_.rows() != dim || mat_.cols() != dim)
    throw std::invalid_argument("density matrix dimension mismatch");
}

DensityMatrix DensityMatrix::computational(int n, uint64_t basis_index) {
  DensityMatrix rho(n);
  if (basis_index >= (uint64_t{1} << n))
    throw std::invalid_argument("basis index out of range");
  rho.mat_(basis_index, basis_index) = 1.0;
  return rho;
}

DensityMatrix DensityMatrix::from_statevector(int n, const Eigen::VectorXcd& psi) {
  if (psi.size() != (int64_t{1} << n))
    throw std::invalid_argument("statevector dimension mismatch");
  return DensityMatrix(n, psi * psi.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int n) {
  const int64_t dim = int64_t{1} << n;
  return DensityMatrix(n, Eigen::MatrixXcd::Identity(dim, dim) / double(dim));
}

DensityMatrix DensityMatrix::product_state(std::span<const char> letters) {
  const int n = static_cast<int>(letters.size());
  const std::complex<double> i(0, 1);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(1);
  const double s = 1.0 / std::sqrt(2.0);
  for (char c : letters) {
    Eigen::Vector2cd q;
    switch (c) {
      case '0': q << 1, 0; break;
      case '1': q << 0, 1; break;
      case '+': q << s, s; break;
      case '-': q << s, -s; break;
      case 'r': q << s, s * i; break;
      case 'l': q << s, -s * i; break;
      default: throw std::invalid_argument("unknown product-state letter");
    }
    Eigen::VectorXcd next(psi.size() * 2);
    for (int64_t a = 0; a < psi.size(); ++a) {
      next(2 * a) = psi(a) * q(0);
      next(2 * a + 1) = psi(a) * q(1);
    }
    psi = std::move(next);
  }
  return from_statevector(n, psi);
}

double DensityMatrix::hermiticity_error() const {
  return (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(((mat_ + mat_.adjoint()) / 2.0).eval());
  return es.eigenvalues().minCoeff();
}

std::vector<double> DensityMatrix::populations() const {
  std::vector<double> p(dim());
  for (int64_t j = 0; j < dim(); ++j) p[j] = mat_(j, j).real();
  return p;
}

std::complex<double> DensityMatrix::expectation(const Eigen::MatrixXcd& op) const {
  return (op * mat_).trace();
}

double DensityMatrix::expectation(const PauliString& op) const {
  if (op.size() != n_) throw std::invalid_argument("observable length mismatch");
  // Tr[P rho] = sum_j phase(j) rho(j, j ^ x)
  std::complex<double> acc = 0;
  const uint64_t x = op.x_mask();
  for (int64_t j = 0; j < dim(); ++j) acc += op.basis_phase(j) * mat_(j, j ^ x);
  return acc.real();
}

DensityMatrix DensityMatrix::partial_trace(std::span<const int> keep) const {
  const int k = static_cast<int>(keep.size());
  const int64_t kd = int64_t{1} << k;
  // Positions of kept qubits inside the full index.
  std::vector<int> shift(k);
  for (int j = 0; j < k; ++j) {
    if (keep[j] < 0 || keep[j] >= n_) throw std::invalid_argument("partial_trace: bad qubit");
    shift[j] = n_ - 1 - keep[j];
  }
  uint64_t keep_mask = 0;
  for (int s : shift) keep_mask |= (1ull << s);

  auto expand = [&](int64_t r) {
    uint64_t full = 0;
    for (int j = 0; j < k; ++j)
      if (r & (int64_t{1} << (k - 1 - j))) full |= (1ull << shift[j]);
    return full;
  };

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(kd, kd);
  const uint64_t rest_mask = ((uint64_t{1} << n_) - 1) & ~keep_mask;
  for (int64_t a = 0; a < kd; ++a) {
    const uint64_t fa = expand(a);
    for (int64_t b = 0; b < kd; ++b) {
      const uint64_t fb = expand(b);
      std::complex<double> acc = 0;
      // Iterate the traced-out configurations via mask-increment.
      uint64_t r = 0;
      while (true) {
        acc += mat_(fa | r, fb | r);
        if (r == rest_mask) break;
        r = (r - rest_mask) & rest_mask;  // next subset of rest_mask
      }
      out(a, b) = acc;
    }
  }
  return DensityMatrix(k, std::move(out));
}

void apply_unitary(DensityMatrix& rho, const Eigen::MatrixXcd& u) {
  if (u.rows() != rho.dim()) throw std::invalid_argument("unitary dimension mismatch");
  rho.matrix() = u * rho.matrix() * u.adjoint();
}

void apply_pauli(DensityMatrix& rho, const PauliString& p) {
  if (p.size() != rho.qubits()) throw std::invalid_argument("apply_pauli: dimension mismatch");
  const uint64_t x = p.x_mask();
  const int64_t dim = rho.dim();
  const Eigen::MatrixXcd& src = rho.matrix();
  Eigen::MatrixXcd dst(dim, dim);
  for (int64_t b = 0; b < dim; ++b) {
    const std::complex<double> pb = std::conj(p.basis_phase(b ^ x));
    for (int64_t a = 0; a < dim; ++a)
      dst(a, b) = p.basis_phase(a ^ x) * pb * src(a ^ x, b ^ x);
  }
  rho.matrix() = std::move(dst);
}

void accumulate_pauli_sandwich(Eigen::MatrixXcd& dst, const Eigen::MatrixXcd& src,
                               const PauliString& p, double coeff) {
  const uint64_t x = p.x_mask();
  const int64_t dim = src.rows();
  for (int64_t b = 0; b < dim; ++b) {
    const std::complex<double> pb = coeff * std::conj(p.basis_phase(b ^ x));
    for (int64_t a = 0; a < dim; ++a)
      dst(a, b) += p.basis_phase(a ^ x) * pb * src(a ^ x, b ^ x);
  }
}

DensityMatrix applied_pauli(const DensityMatrix& rho, const PauliString& p) {
  DensityMatrix out = rho;
  apply_pauli(out, p);
  return out;
}

void apply_single_qubit_kraus(DensityMatrix& rho, int qubit,
                              std::span<const Eigen::Matrix2cd> kraus) {
  const int n = rho.qubits();
  if (qubit < 0 || qubit >= n) throw std::invalid_argument("kraus: qubit out of range");
  const uint64_t bit = 1ull << (n - 1 - qubit);
  const int64_t dim = rho.dim();
  const Eigen::MatrixXcd& src = rho.matrix();
  Eigen::MatrixXcd dst = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& K : kraus) {
    for (int64_t a = 0; a < dim; ++a) {
      const int abit = (a & bit) ? 1 : 0;
      for (int ap = 0; ap < 2; ++ap) {
        const std::complex<double> ka = K(abit, ap);
        if (ka == 0.0) continue;
        const int64_t asrc = ap ? (a | bit) : (a & ~bit);
        for (int64_t b = 0; b < dim; ++b) {
          const int bbit = (b & bit) ? 1 : 0;
          for (int bp = 0; bp < 2; ++bp) {
            const std::complex<double> kb = K(bbit, bp);
            if (kb == 0.0) continue;
            const int64_t bsrc = bp ? (b | bit) : (b & ~bit);
            dst(a, b) += ka * std::conj(kb) * src(asrc, bsrc);
          }
        }
      }
    }
  }
  rho.matrix() = std::move(dst);
}

Eigen::MatrixXcd embed_one_qubit(const Eigen::Matrix2cd& op, int n, int qubit) {
  if (qubit < 0 || qubit >= n) throw std::invalid_argument("embed: qubit out of range");
  const int64_t dim = int64_t{1} << n;
  const uint64_t bit = 1ull << (n - 1 - qubit);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (int64_t a = 0; a < dim; ++a) {
    const int ab = (a & bit) ? 1 : 0;
    for (int bp = 0; bp < 2; ++bp) {
      const std::complex<double> v = op(ab, bp);
      if (v == 0.0) continue;
      const int64_t col = bp ? (a | bit) : (a & ~bit);
      out(a, col) += v;
    }
  }
  return out;
}

Eigen::MatrixXcd embed_two_qubit(const Eigen::Matrix4cd& op, int n, int q0, int q1) {
  if (q0 == q1) throw std::invalid_argument("embed: duplicate qubit operands");
  if (q0 < 0 || q0 >= n || q1 < 0 || q1 >= n)
    throw std::invalid_argument("embed: qubit out of range");
  const int64_t dim = int64_t{1} << n;
  const uint64_t b0 = 1ull << (n - 1 - q0), b1 = 1ull << (n - 1 - q1);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (int64_t a = 0; a < dim; ++a) {
    const int ar = ((a & b0) ? 2 : 0) | ((a & b1) ? 1 : 0);
    for (int c = 0; c < 4; ++c) {
      const std::complex<double> v = op(ar, c);
      if (v == 0.0) continue;
      int64_t col = a & ~(b0 | b1);
      if (c & 2) col |= b0;
      if (c & 1) col |= b1;
      out(a, col) += v;
    }
  }
  return out;
}

}  // namespace noiseforge
