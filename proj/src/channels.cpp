#include "noiseforge/channels.hpp"

#include <cmath>
#include <stdexcept>

namespace noiseforge {

namespace {

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + " out of [0,1]");
}

void check_subgroup(const std::vector<int>& subgroup) {
  if (subgroup.empty() || subgroup.size() > 3)
    throw std::invalid_argument("subgroup width must be 1..3");
  for (size_t a = 0; a < subgroup.size(); ++a)
    for (size_t b = a + 1; b < subgroup.size(); ++b)
      if (subgroup[a] == subgroup[b]) throw std::invalid_argument("subgroup repeats a qubit");
}

}  // namespace

PauliChannel::PauliChannel(std::vector<int> subgroup, std::vector<double> probs)
    : subgroup_(std::move(subgroup)), probs_(std::move(probs)) {
  check_subgroup(subgroup_);
  if (probs_.size() != size_t(1) << (2 * subgroup_.size()))
    throw std::invalid_argument("channel needs 4^K probabilities");
  validate();
}

PauliChannel PauliChannel::from_error_probs(
    std::vector<int> subgroup, const std::vector<std::pair<std::string, double>>& eps) {
  check_subgroup(subgroup);
  const int k = static_cast<int>(subgroup.size());
  std::vector<double> probs(size_t(1) << (2 * k), 0.0);
  double total = 0.0;
  for (const auto& [label, value] : eps) {
    if (static_cast<int>(label.size()) != k)
      throw std::invalid_argument("error-probability label width mismatch: " + label);
    const int idx = pauli_index_of_label(label);
    if (idx == 0) throw std::invalid_argument("identity probability is inferred, not given");
    probs[idx] += value;
    total += value;
  }
  if (total > 1.0 + 1e-12) throw std::invalid_argument("error probabilities exceed 1");
  probs[0] = 1.0 - total;
  return PauliChannel(std::move(subgroup), std::move(probs));
}

PauliChannel PauliChannel::identity(std::vector<int> subgroup) {
  check_subgroup(subgroup);
  std::vector<double> probs(size_t(1) << (2 * subgroup.size()), 0.0);
  probs[0] = 1.0;
  return PauliChannel(std::move(subgroup), std::move(probs));
}

PauliChannel PauliChannel::uniform_error(std::vector<int> subgroup, double eps_per_string) {
  check_subgroup(subgroup);
  const size_t count = size_t(1) << (2 * subgroup.size());
  std::vector<double> probs(count, eps_per_string);
  probs[0] = 1.0 - eps_per_string * double(count - 1);
  return PauliChannel(std::move(subgroup), std::move(probs));
}

PauliChannel PauliChannel::random_error(std::vector<int> subgroup, double lo, double hi,
                                        std::mt19937_64& rng) {
  check_subgroup(subgroup);
  const size_t count = size_t(1) << (2 * subgroup.size());
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> probs(count);
  double total = 0.0;
  for (size_t k = 1; k < count; ++k) {
    probs[k] = dist(rng);
    total += probs[k];
  }
  if (total > 1.0) throw std::invalid_argument("random channel draw exceeds unit probability");
  probs[0] = 1.0 - total;
  return PauliChannel(std::move(subgroup), std::move(probs));
}

double PauliChannel::prob(const std::string& label) const {
  if (static_cast<int>(label.size()) != width())
    throw std::invalid_argument("label width mismatch");
  return probs_[pauli_index_of_label(label)];
}

double PauliChannel::error_total() const {
  double total = 0.0;
  for (size_t k = 1; k < probs_.size(); ++k) total += probs_[k];
  return total;
}

PauliChannel PauliChannel::clamped_normalized(std::vector<int> subgroup,
                                              std::vector<double> raw) {
  double total = 0.0;
  for (double& p : raw) {
    if (p < 0.0) p = 0.0;
    total += p;
  }
  if (total <= 0.0) throw std::invalid_argument("channel has no probability mass");
  for (double& p : raw) p /= total;
  return PauliChannel(std::move(subgroup), std::move(raw));
}

void PauliChannel::validate(double tol) const {
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= -tol && p <= 1.0 + tol))
      throw std::invalid_argument("channel probability out of [0,1]");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-10)
    throw std::invalid_argument("channel probabilities must sum to 1");
}

PauliString PauliChannel::embedded_word(int index, int n) const {
  const PauliString local = PauliString::from_label(pauli_label_of_index(index, width()));
  return local.embedded(n, subgroup_);
}

double AmplitudeDampingSpec::theta_for(double w) {
  check_probability(w, "damping probability");
  return 2.0 * std::asin(std::sqrt(w));
}

double AmplitudeDampingSpec::w_for(double theta) {
  const double s = std::sin(theta / 2.0);
  return s * s;
}

void ResetSpec::validate() const {
  check_probability(prob, "reset probability");
  check_probability(p_er, "reset failure probability");
  auto check_unitary = [](const Eigen::Matrix2cd& m) {
    if ((m.adjoint() * m - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("reset basis is not unitary");
  };
  check_unitary(pre);
  check_unitary(post);
}

void LindbladSpec::merge(const LindbladSpec& other) {
  pauli.insert(pauli.end(), other.pauli.begin(), other.pauli.end());
  damping.insert(damping.end(), other.damping.begin(), other.damping.end());
  general.insert(general.end(), other.general.begin(), other.general.end());
}

void apply_pauli_channel(DensityMatrix& rho, const PauliChannel& ch) {
  ch.validate();
  const int n = rho.qubits();
  for (int q : ch.subgroup())
    if (q < 0 || q >= n) throw std::invalid_argument("channel subgroup out of range");

  const Eigen::MatrixXcd src = rho.matrix();
  rho.matrix() = ch.prob(0) * src;
  for (int k = 1; k < ch.size(); ++k) {
    const double eps = ch.prob(k);
    if (eps == 0.0) continue;
    accumulate_pauli_sandwich(rho.matrix(), src, ch.embedded_word(k, n), eps);
  }
}

void apply_amplitude_damping(DensityMatrix& rho, int qubit, double w) {
  check_probability(w, "damping probability");
  Eigen::Matrix2cd k0 = Eigen::Matrix2cd::Zero(), k1 = Eigen::Matrix2cd::Zero();
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - w);
  k1(0, 1) = std::sqrt(w);
  const Eigen::Matrix2cd kraus[] = {k0, k1};
  apply_single_qubit_kraus(rho, qubit, kraus);
}

void apply_reset_channel(DensityMatrix& rho, int qubit, double w, double p_er) {
  check_probability(w, "reset probability");
  check_probability(p_er, "reset failure probability");
  // Kraus set: sqrt(1 - w_eff) I, sqrt(w_eff)|0><0|, sqrt(w_eff)|0><1|
  const double w_eff = w * (1.0 - p_er);
  Eigen::Matrix2cd ki = std::sqrt(1.0 - w_eff) * Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd k0 = Eigen::Matrix2cd::Zero(), k1 = Eigen::Matrix2cd::Zero();
  k0(0, 0) = std::sqrt(w_eff);
  k1(0, 1) = std::sqrt(w_eff);
  const Eigen::Matrix2cd kraus[] = {ki, k0, k1};
  apply_single_qubit_kraus(rho, qubit, kraus);
}

void apply_generalized_reset(DensityMatrix& rho, int qubit, double p,
                             const Eigen::Matrix2cd& u, const Eigen::Matrix2cd& v) {
  check_probability(p, "reset probability");
  auto check_unitary = [](const Eigen::Matrix2cd& m) {
    if ((m.adjoint() * m - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("generalized reset basis is not unitary");
  };
  check_unitary(u);
  check_unitary(v);
  const Eigen::Vector2cd psi = v.col(0);       // V|0>
  const Eigen::Vector2cd phi = u.col(0);       // U|0>
  const Eigen::Vector2cd phi_perp = u.col(1);  // U|1>
  Eigen::Matrix2cd ki = std::sqrt(1.0 - p) * Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd ka = std::sqrt(p) * (psi * phi.adjoint());
  Eigen::Matrix2cd kb = std::sqrt(p) * (psi * phi_perp.adjoint());
  const Eigen::Matrix2cd kraus[] = {ki, ka, kb};
  apply_single_qubit_kraus(rho, qubit, kraus);
}

void apply_reset_slot(DensityMatrix& rho, const ResetSpec& slot) {
  slot.validate();
  if (slot.generalized) {
    apply_generalized_reset(rho, slot.qubit, slot.prob * (1.0 - slot.p_er), slot.pre, slot.post);
  } else {
    apply_reset_channel(rho, slot.qubit, slot.prob, slot.p_er);
  }
}

LindbladSpec channel_to_dissipator(const PauliChannel& ch, double dt, int n) {
  if (!(dt > 0.0)) throw std::invalid_argument("time-step must be positive");
  ch.validate();
  LindbladSpec spec;
  for (int k = 1; k < ch.size(); ++k) {
    const double eps = ch.prob(k);
    if (eps == 0.0) continue;
    spec.pauli.push_back({ch.embedded_word(k, n), eps / dt});
  }
  return spec;
}

LindbladSpec channel_to_dissipator(const AmplitudeDampingSpec& ad, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time-step must be positive");
  LindbladSpec spec;
  for (size_t q = 0; q < ad.w.size(); ++q) {
    check_probability(ad.w[q], "damping probability");
    if (ad.w[q] == 0.0) continue;
    spec.damping.push_back({static_cast<int>(q), ad.w[q] / dt});
  }
  return spec;
}

LindbladSpec channel_to_dissipator(const ResetSpec& slot, double dt, int n) {
  if (!(dt > 0.0)) throw std::invalid_argument("time-step must be positive");
  slot.validate();
  LindbladSpec spec;
  const double w_eff = slot.prob * (1.0 - slot.p_er);
  if (w_eff == 0.0) return spec;
  if (slot.generalized) {
    spec.general.push_back({slot.qubit, w_eff / dt, slot.pre, slot.post});
  } else {
    const double gamma = w_eff / dt;
    spec.damping.push_back({slot.qubit, gamma});
    // Z-dephasing byproduct at one quarter of the damping rate.
    spec.pauli.push_back({PauliString::single(n, slot.qubit, 'Z'), gamma / 4.0});
  }
  return spec;
}

double reset_dephasing_probability(double w) {
  check_probability(w, "reset probability");
  return (1.0 - std::sqrt(1.0 - w)) / 2.0;
}

}  // namespace noiseforge
