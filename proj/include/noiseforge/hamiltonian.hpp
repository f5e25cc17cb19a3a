#pragma once

#include <vector>

#include <Eigen/Dense>

#include "noiseforge/pauli.hpp"

namespace noiseforge {

// Real-weighted Pauli-string decomposition H = sum_j coeff_j * word_j.
struct Hamiltonian {
  struct Term {
    double coeff = 0.0;
    PauliString word;
  };

  int n = 0;
  std::vector<Term> terms;

  Eigen::MatrixXcd dense() const;
  void validate() const;
};

// Linear chain of two-level sites: site energies E_m and nearest-neighbour
// hopping couplings J_{m,m+1}.
struct ChainParams {
  int n = 0;
  std::vector<double> site_energies;  // length n
  std::vector<double> couplings;      // length n-1
};

// Terms -E_m/2 Z_m, then per bond +J/2 (X X) and +J/2 (Y Y); 3n-2 terms.
Hamiltonian build_chain_hamiltonian(const ChainParams& p);

// Transverse-field Ising chain: -J Z_m Z_{m+1} and +h X_m; 2n-1 terms.
Hamiltonian build_tfim_hamiltonian(int n, double coupling, double field);

}  // namespace noiseforge
