#include "noiseforge/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

namespace noiseforge {

Eigen::MatrixXcd Hamiltonian::dense() const {
  const int64_t dim = int64_t{1} << n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : terms) h += t.coeff * t.word.dense();
  return h;
}

void Hamiltonian::validate() const {
  for (const auto& t : terms) {
    if (!std::isfinite(t.coeff)) throw std::invalid_argument("non-finite Hamiltonian coefficient");
    if (t.word.size() != n) throw std::invalid_argument("Hamiltonian term length mismatch");
  }
}

Hamiltonian build_chain_hamiltonian(const ChainParams& p) {
  if (p.n < 2) throw std::invalid_argument("chain needs at least two sites");
  if (static_cast<int>(p.site_energies.size()) != p.n)
    throw std::invalid_argument("site_energies length must equal n");
  if (static_cast<int>(p.couplings.size()) != p.n - 1)
    throw std::invalid_argument("couplings length must equal n-1");

  Hamiltonian h;
  h.n = p.n;
  for (int m = 0; m < p.n; ++m)
    h.terms.push_back({-p.site_energies[m] / 2.0, PauliString::single(p.n, m, 'Z')});
  for (int m = 0; m + 1 < p.n; ++m) {
    std::string xx(p.n, 'I'), yy(p.n, 'I');
    xx[m] = xx[m + 1] = 'X';
    yy[m] = yy[m + 1] = 'Y';
    h.terms.push_back({p.couplings[m] / 2.0, PauliString::from_label(xx)});
    h.terms.push_back({p.couplings[m] / 2.0, PauliString::from_label(yy)});
  }
  h.validate();
  return h;
}

Hamiltonian build_tfim_hamiltonian(int n, double coupling, double field) {
  if (n < 2) throw std::invalid_argument("tfim needs at least two sites");
  Hamiltonian h;
  h.n = n;
  for (int m = 0; m + 1 < n; ++m) {
    std::string zz(n, 'I');
    zz[m] = zz[m + 1] = 'Z';
    h.terms.push_back({-coupling, PauliString::from_label(zz)});
  }
  for (int m = 0; m < n; ++m)
    h.terms.push_back({field, PauliString::single(n, m, 'X')});
  h.validate();
  return h;
}

}  // namespace noiseforge
