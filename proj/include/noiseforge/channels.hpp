#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "noiseforge/density.hpp"
#include "noiseforge/pauli.hpp"

namespace noiseforge {

// Stochastic Pauli channel on a K-qubit subgroup: probabilities over all
// 4^K subgroup words in base-4 order (index 0 is the identity word).
class PauliChannel {
public:
  PauliChannel() = default;
  PauliChannel(std::vector<int> subgroup, std::vector<double> probs);

  // eps_0 inferred as 1 - sum of the given non-identity probabilities.
  static PauliChannel from_error_probs(std::vector<int> subgroup,
                                       const std::vector<std::pair<std::string, double>>& eps);
  static PauliChannel identity(std::vector<int> subgroup);
  static PauliChannel uniform_error(std::vector<int> subgroup, double eps_per_string);
  static PauliChannel random_error(std::vector<int> subgroup, double lo, double hi,
                                   std::mt19937_64& rng);

  int width() const { return static_cast<int>(subgroup_.size()); }
  int size() const { return static_cast<int>(probs_.size()); }  // 4^K
  const std::vector<int>& subgroup() const { return subgroup_; }
  const std::vector<double>& probs() const { return probs_; }
  double prob(int index) const { return probs_[index]; }
  double prob(const std::string& label) const;
  double error_total() const;  // sum over non-identity words

  // Clamp negative raw values to zero and rescale to unit total.
  static PauliChannel clamped_normalized(std::vector<int> subgroup, std::vector<double> raw);

  void validate(double tol = 1e-12) const;

  // Subgroup word of index k widened onto an n-qubit register.
  PauliString embedded_word(int index, int n) const;

private:
  std::vector<int> subgroup_;
  std::vector<double> probs_;
};

// Per-qubit amplitude damping probabilities; theta is the interaction angle
// with w = sin^2(theta/2).
struct AmplitudeDampingSpec {
  std::vector<double> w;  // indexed by qubit
  static double theta_for(double w);
  static double w_for(double theta);
};

struct ResetSpec {
  int qubit = 0;
  double prob = 0.0;      // application probability w (or p for generalized)
  double p_er = 0.0;      // reset failure probability
  bool generalized = false;
  Eigen::Matrix2cd pre = Eigen::Matrix2cd::Identity();   // U
  Eigen::Matrix2cd post = Eigen::Matrix2cd::Identity();  // V
  void validate() const;
};

// Lindblad generator specification assembled from channels.
struct LindbladSpec {
  struct PauliRate {
    PauliString word;  // full-register embedded
    double rate = 0.0;
  };
  struct DampingRate {
    int qubit = 0;
    double rate = 0.0;
  };
  struct ResetPairRate {
    int qubit = 0;
    double rate = 0.0;  // gamma = p / dt, shared by the |Psi><Phi| pair
    Eigen::Matrix2cd pre = Eigen::Matrix2cd::Identity();
    Eigen::Matrix2cd post = Eigen::Matrix2cd::Identity();
  };

  std::vector<PauliRate> pauli;
  std::vector<DampingRate> damping;
  std::vector<ResetPairRate> general;

  bool empty() const { return pauli.empty() && damping.empty() && general.empty(); }
  void merge(const LindbladSpec& other);
};

// rho -> sum_k eps_k P_k rho P_k with subgroup words embedded in the register.
void apply_pauli_channel(DensityMatrix& rho, const PauliChannel& ch);

// Kraus map {sigma0, sqrt(w) sigma-} on one qubit.
void apply_amplitude_damping(DensityMatrix& rho, int qubit, double w);

// (1-w) rho + w [p_er rho + (1-p_er) R(rho)] with R resetting `qubit` to |0>.
void apply_reset_channel(DensityMatrix& rho, int qubit, double w, double p_er);

// (1-p) rho + p V(rho) with V built from |Psi>=V|0>, |Phi>=U|0>, |Phi_perp>=U|1>.
void apply_generalized_reset(DensityMatrix& rho, int qubit, double p,
                             const Eigen::Matrix2cd& u, const Eigen::Matrix2cd& v);

void apply_reset_slot(DensityMatrix& rho, const ResetSpec& slot);

// Channel-per-layer -> Lindblad rates at the given time-step; n is the
// register width the subgroup words are embedded into.
LindbladSpec channel_to_dissipator(const PauliChannel& ch, double dt, int n);
LindbladSpec channel_to_dissipator(const AmplitudeDampingSpec& spec, double dt);
LindbladSpec channel_to_dissipator(const ResetSpec& slot, double dt, int n);

// Exact dephasing admixture of the reset channel at finite w:
// E_reset(w) = AD(w) composed with Z-dephasing of probability
// (1 - sqrt(1-w)) / 2, which tends to w/4 for small w.
double reset_dephasing_probability(double w);

}  // namespace noiseforge
