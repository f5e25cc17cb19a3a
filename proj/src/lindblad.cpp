#include "noiseforge/lindblad.hpp"

#include <cmath>
#include <stdexcept>

namespace noiseforge {

namespace {

// Precompiled right-hand side of the master equation.
class Liouvillian {
public:
  Liouvillian(const Hamiltonian& h, const LindbladSpec& spec) : n_(h.n) {
    ham_ = h.dense();
    pauli_ = spec.pauli;
    const int64_t dim = int64_t{1} << n_;
    for (const auto& d : spec.damping) {
      Eigen::Matrix2cd lower = Eigen::Matrix2cd::Zero();
      lower(0, 1) = 1.0;
      jump_.push_back({d.rate, embed_one_qubit(lower, n_, d.qubit), {}});
    }
    for (const auto& g : spec.general) {
      const Eigen::Vector2cd psi = g.post.col(0);
      const Eigen::Vector2cd phi = g.pre.col(0);
      const Eigen::Vector2cd phi_perp = g.pre.col(1);
      jump_.push_back({g.rate, embed_one_qubit(psi * phi.adjoint(), n_, g.qubit), {}});
      jump_.push_back({g.rate, embed_one_qubit(psi * phi_perp.adjoint(), n_, g.qubit), {}});
    }
    for (auto& j : jump_) j.ldl = (j.op.adjoint() * j.op).eval();
    (void)dim;
  }

  Eigen::MatrixXcd operator()(const Eigen::MatrixXcd& rho) const {
    const std::complex<double> img(0, 1);
    Eigen::MatrixXcd out = -img * (ham_ * rho - rho * ham_);
    DensityMatrix scratch(n_);
    for (const auto& p : pauli_) {
      scratch.matrix() = rho;
      apply_pauli(scratch, p.word);
      out += p.rate * (scratch.matrix() - rho);
    }
    for (const auto& j : jump_) {
      out += j.rate * (j.op * rho * j.op.adjoint() -
                       0.5 * (j.ldl * rho + rho * j.ldl));
    }
    return out;
  }

private:
  struct Jump {
    double rate;
    Eigen::MatrixXcd op;
    Eigen::MatrixXcd ldl;
  };

  int n_;
  Eigen::MatrixXcd ham_;
  std::vector<LindbladSpec::PauliRate> pauli_;
  std::vector<Jump> jump_;
};

}  // namespace

TimeSeries rk4_propagate(const LindbladRun& run) {
  if (!(run.dt > 0.0) || !(run.total_time > 0.0))
    throw std::invalid_argument("rk4: time inputs must be positive");
  run.hamiltonian.validate();

  const Liouvillian rhs(run.hamiltonian, run.dissipators);
  const int64_t steps = std::llround(run.total_time / run.dt);
  if (steps < 1) throw std::invalid_argument("rk4: no steps to take");
  const double dt = run.total_time / double(steps);
  const int stride = std::max(1, run.output_stride);

  TimeSeries out;
  DensityMatrix rho = run.initial;
  out.times.push_back(0.0);
  out.states.push_back(rho);
  for (int64_t s = 1; s <= steps; ++s) {
    const Eigen::MatrixXcd& m = rho.matrix();
    const Eigen::MatrixXcd k1 = rhs(m);
    const Eigen::MatrixXcd k2 = rhs(m + 0.5 * dt * k1);
    const Eigen::MatrixXcd k3 = rhs(m + 0.5 * dt * k2);
    const Eigen::MatrixXcd k4 = rhs(m + dt * k3);
    rho.matrix() = m + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    rho.hermitize();
    const double drift = std::abs(rho.trace_real() - 1.0);
    if (drift > 1e-6)
      throw std::runtime_error("rk4: step instability, trace drift " + std::to_string(drift));
    if (s % stride == 0 || s == steps) {
      out.times.push_back(dt * double(s));
      out.states.push_back(rho);
    }
  }
  return out;
}

TimeSeries rk4_propagate_verified(const LindbladRun& run, double tol, int max_halvings) {
  LindbladRun r = run;
  TimeSeries coarse = rk4_propagate(r);
  for (int round = 0; round < max_halvings; ++round) {
    LindbladRun half = r;
    half.dt = r.dt / 2.0;
    half.output_stride = r.output_stride * 2;
    TimeSeries fine = rk4_propagate(half);
    double gap = 0.0;
    for (size_t s = 0; s < coarse.states.size(); ++s) {
      const auto pc = coarse.states[s].populations();
      const auto pf = fine.states[s].populations();
      for (size_t j = 0; j < pc.size(); ++j) gap = std::max(gap, std::abs(pc[j] - pf[j]));
    }
    if (gap < tol) return fine;
    r = half;
    coarse = std::move(fine);
  }
  throw std::runtime_error("rk4: step-doubling did not converge");
}

TimeSeries trotterized_lindblad(const Hamiltonian& h,
                                const std::vector<PauliChannel>& channels,
                                const std::vector<ResetSpec>& resets,
                                const DensityMatrix& initial, int layers, double dt,
                                int order) {
  if (layers < 1) throw std::invalid_argument("trotterized_lindblad: layers must be positive");
  TrotterPlan plan;
  plan.order = order;
  plan.dt = dt;
  plan.layers = layers;
  const TrotterCircuit layer = build_trotter_layer(h, plan);
  const Eigen::MatrixXcd u = circuit_unitary(layer);

  TimeSeries out;
  DensityMatrix rho = initial;
  out.times.push_back(0.0);
  out.states.push_back(rho);
  for (int d = 1; d <= layers; ++d) {
    apply_unitary(rho, u);
    for (const auto& ch : channels) apply_pauli_channel(rho, ch);
    for (const auto& slot : resets) apply_reset_slot(rho, slot);
    out.times.push_back(dt * double(d));
    out.states.push_back(rho);
  }
  return out;
}

std::vector<double> eta_metric(const TimeSeries& quantum, const TimeSeries& classical) {
  std::vector<std::vector<double>> pops(quantum.states.size());
  for (size_t s = 0; s < quantum.states.size(); ++s) pops[s] = quantum.states[s].populations();
  return eta_metric(pops, classical);
}

std::vector<double> eta_metric(const std::vector<std::vector<double>>& populations_q,
                               const TimeSeries& classical) {
  if (populations_q.size() != classical.states.size())
    throw std::invalid_argument("eta_metric: time grids differ");
  std::vector<double> eta(populations_q.size());
  for (size_t s = 0; s < populations_q.size(); ++s) {
    const auto pc = classical.states[s].populations();
    if (pc.size() != populations_q[s].size())
      throw std::invalid_argument("eta_metric: dimension mismatch");
    double acc = 0.0;
    for (size_t j = 0; j < pc.size(); ++j) acc += std::abs(populations_q[s][j] - pc[j]);
    eta[s] = acc / double(pc.size());
  }
  return eta;
}

}  // namespace noiseforge
