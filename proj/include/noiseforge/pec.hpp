#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "noiseforge/channels.hpp"
#include "noiseforge/device.hpp"

namespace noiseforge {

// Signed quasi-probability decomposition of a partially inverted Pauli
// channel: q_0 = 1 + sum_{k>0} r_k eps_k, q_{k>0} = -r_k eps_k.
struct QuasiProbability {
  std::vector<int> subgroup;
  std::vector<double> q;      // signed, indexed like the channel
  std::vector<double> p;      // |q_k| / c_mit
  std::vector<int> sign;      // sign(q_k)
  double c_mit = 1.0;         // sum |q_k|

  int width() const { return static_cast<int>(subgroup.size()); }
  int size() const { return static_cast<int>(q.size()); }
};

QuasiProbability build_quasiprobability(const PauliChannel& ch, const std::vector<double>& r);
QuasiProbability build_quasiprobability(const PauliChannel& ch, double uniform_r);

// Delta-t scheduling plus per-channel mitigation factors that realize target
// decoherence rates Gamma_k = eps_k (1 - r_k) / dt.
struct MitigationPlan {
  struct ChannelPlan {
    PauliChannel eps;
    std::vector<double> targets;    // Gamma_k, indexed like the channel
    std::vector<double> r;          // mitigation factors
    std::vector<double> realized;   // eps_k (1 - r_k) / dt
    QuasiProbability quasi;
  };

  double dt_max = 0.0;  // infinity encoded as 0 when no rate binds
  double dt = 0.0;
  int layers = 0;       // D
  double total_time = 0.0;
  std::vector<ChannelPlan> channels;
  double c_iter = 1.0;  // product of per-subgroup C_mit
  double c_tot = 1.0;   // c_iter^D

  // Default circuit budget: ceil(90 C_tot^2).
  long default_samples() const;
};

MitigationPlan plan_decoherence_control(const std::vector<PauliChannel>& eps,
                                        const std::vector<std::vector<double>>& targets,
                                        double total_time,
                                        std::optional<double> forced_dt = std::nullopt);

// Plan directly from given mitigation factors at a fixed time-step; the
// realized rates follow as eps_k (1 - r_k) / dt.
MitigationPlan plan_from_factors(const std::vector<PauliChannel>& eps,
                                 const std::vector<std::vector<double>>& r, double dt,
                                 double total_time);

// One Monte Carlo draw of per-layer, per-subgroup insertions on an n-qubit
// register.
InsertionSchedule sample_insertions(const MitigationPlan& plan, int n, int layers, uint64_t seed);

struct Estimate {
  double mean = 0.0;
  double stderr = 0.0;
};

// Plain PEC estimator: mean of c_tot * sign * value with its sample stderr.
Estimate mitigated_expectation(std::span<const std::pair<int, double>> samples, double c_tot);

// C_tot = (1 + 2 eps_r)^(g(n) * D).
double total_cost(double eps_r, int subgroup_count, int layers);

// Per-layer cost over subgroups: product of C_mit.
double iteration_cost(std::span<const QuasiProbability> quasis);

// eps <= Gamma t / D + ln(M_max) / (2 lambda n D^2).
double max_error_budget(double gamma_total, double total_time, int layers, int n, double lambda,
                        double m_max);

// Least-squares fit of log C_tot against D for one series.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of log residuals
};
SlopeFit fit_log_slope(std::span<const double> depths, std::span<const double> c_tot);

struct CostSeries {
  double label = 0.0;  // n or r, whichever the sweep varies
  std::vector<double> depths;
  std::vector<double> c_tot;
};

// Per-series slopes plus lambda from slope = lambda * (n * eps_r), fitted
// through the origin.
struct CostScalingFit {
  std::vector<SlopeFit> series;
  double lambda = 0.0;
};
CostScalingFit fit_cost_scaling(std::span<const CostSeries> series,
                                std::span<const double> n_eps_r);

// Reset slots realizing damping rates Gamma_m = w_m (1 - p_er) / dt, plus the
// single-qubit Z channels describing the dephasing byproduct (exact finite-w
// admixture) for the mitigation plan.
struct DampingSchedule {
  std::vector<GateOp> slots;
  std::vector<PauliChannel> byproduct;  // one K=1 channel per damped qubit
};
DampingSchedule schedule_resets(std::span<const double> gamma_ad, double dt, double p_er);

}  // namespace noiseforge
