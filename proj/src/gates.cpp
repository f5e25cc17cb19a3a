#include "noiseforge/gates.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "noiseforge/density.hpp"

namespace noiseforge {

namespace {
constexpr std::complex<double> kI(0.0, 1.0);
constexpr double kQuarterTol = 1e-12;
}  // namespace

GateOp GateOp::rz(int q, double theta) { return GateOp{GateKind::RotZ, q, -1, theta}; }
GateOp GateOp::rx(int q, double theta) { return GateOp{GateKind::RotX, q, -1, theta}; }
GateOp GateOp::ry(int q, double theta) { return GateOp{GateKind::RotY, q, -1, theta}; }
GateOp GateOp::hadamard(int q) { return GateOp{GateKind::Hadamard, q}; }
GateOp GateOp::cnot(int control, int target) { return GateOp{GateKind::Cnot, control, target}; }

GateOp GateOp::reset(int q, double prob) {
  if (prob < 0.0 || prob > 1.0) throw std::invalid_argument("reset probability out of [0,1]");
  GateOp g{GateKind::Reset, q};
  g.prob = prob;
  return g;
}

GateOp GateOp::generalized_reset(int q, double prob, const Eigen::Matrix2cd& u,
                                 const Eigen::Matrix2cd& v) {
  if (prob < 0.0 || prob > 1.0) throw std::invalid_argument("reset probability out of [0,1]");
  auto check_unitary = [](const Eigen::Matrix2cd& m) {
    if ((m.adjoint() * m - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("generalized reset basis is not unitary");
  };
  check_unitary(u);
  check_unitary(v);
  GateOp g{GateKind::GeneralizedReset, q};
  g.prob = prob;
  g.pre = u;
  g.post = v;
  return g;
}

bool GateOp::is_clifford() const {
  switch (kind) {
    case GateKind::Hadamard:
    case GateKind::Cnot:
      return true;
    case GateKind::RotZ: {
      const double q = angle / (std::numbers::pi / 2.0);
      return std::abs(q - std::round(q)) < kQuarterTol;
    }
    default:
      return false;
  }
}

void GateOp::validate(int n) const {
  if (q0 < 0 || q0 >= n) throw std::invalid_argument("gate operand out of range");
  if (kind == GateKind::Cnot) {
    if (q1 < 0 || q1 >= n) throw std::invalid_argument("gate operand out of range");
    if (q0 == q1) throw std::invalid_argument("gate operands must be distinct");
  }
}

Eigen::Matrix2cd rotation_matrix(GateKind axis, double theta) {
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  Eigen::Matrix2cd m;
  switch (axis) {
    case GateKind::RotZ:
      m << std::exp(-kI * (theta / 2.0)), 0, 0, std::exp(kI * (theta / 2.0));
      break;
    case GateKind::RotX:
      m << c, -kI * s, -kI * s, c;
      break;
    case GateKind::RotY:
      m << c, -s, s, c;
      break;
    default:
      throw std::invalid_argument("not a rotation axis");
  }
  return m;
}

Eigen::MatrixXcd gate_matrix(const GateOp& g, int n) {
  g.validate(n);
  switch (g.kind) {
    case GateKind::RotZ:
    case GateKind::RotX:
    case GateKind::RotY:
      return embed_one_qubit(rotation_matrix(g.kind, g.angle), n, g.q0);
    case GateKind::Hadamard: {
      Eigen::Matrix2cd h;
      const double s = 1.0 / std::sqrt(2.0);
      h << s, s, s, -s;
      return embed_one_qubit(h, n, g.q0);
    }
    case GateKind::Cnot: {
      Eigen::Matrix4cd c = Eigen::Matrix4cd::Zero();
      c(0, 0) = c(1, 1) = c(2, 3) = c(3, 2) = 1.0;
      return embed_two_qubit(c, n, g.q0, g.q1);
    }
    default:
      throw std::invalid_argument("reset slots have no unitary matrix");
  }
}

PauliString clifford_conjugate(const GateOp& g, const PauliString& p) {
  const int n = p.size();
  g.validate(n);
  if (!g.is_clifford()) throw std::invalid_argument("clifford_conjugate: gate is not Clifford");

  uint64_t x = p.x_mask(), z = p.z_mask();
  int e = p.phase_exponent();
  const uint64_t b0 = 1ull << (n - 1 - g.q0);

  switch (g.kind) {
    case GateKind::Hadamard: {
      // H X H = Z, H Z H = X, H Y H = -Y
      const bool bx = x & b0, bz = z & b0;
      if (bx && bz) e += 2;
      if (bx != bz) {
        x ^= b0;
        z ^= b0;
      }
      break;
    }
    case GateKind::Cnot: {
      // X_c -> X_c X_t, Z_t -> Z_c Z_t; phases follow from the X^x Z^z form.
      const uint64_t b1 = 1ull << (n - 1 - g.q1);
      if (x & b0) x ^= b1;
      if (z & b1) z ^= b0;
      break;
    }
    case GateKind::RotZ: {
      // S X S^dag = Y; one power of S per quarter turn.
      int quarters = static_cast<int>(std::llround(g.angle / (std::numbers::pi / 2.0))) % 4;
      if (quarters < 0) quarters += 4;
      for (int j = 0; j < quarters; ++j) {
        if (x & b0) {
          e += 1;
          z ^= b0;
        }
      }
      break;
    }
    default:
      throw std::invalid_argument("clifford_conjugate: unsupported gate");
  }

  // Rebuild through the label; from_label adds one power of i per Y, so pass
  // the accumulated exponent relative to that baseline.
  std::string word(n, 'I');
  for (int m = 0; m < n; ++m) {
    const uint64_t bit = 1ull << (n - 1 - m);
    const bool bx = x & bit, bz = z & bit;
    word[m] = bx ? (bz ? 'Y' : 'X') : (bz ? 'Z' : 'I');
  }
  const int y_count = static_cast<int>(std::popcount(x & z));
  return PauliString::from_label(word, ((e - y_count) % 4 + 4) % 4);
}

}  // namespace noiseforge
