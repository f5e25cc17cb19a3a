#include "noiseforge/pec.hpp"

#include <cmath>
#include <stdexcept>

#include "noiseforge/parallel.hpp"

namespace noiseforge {

QuasiProbability build_quasiprobability(const PauliChannel& ch, const std::vector<double>& r) {
  ch.validate();
  if (r.size() != ch.probs().size())
    throw std::invalid_argument("mitigation factors must cover every channel index");
  for (size_t k = 1; k < r.size(); ++k)
    if (!(r[k] >= 0.0 && r[k] <= 1.0))
      throw std::invalid_argument("mitigation factor out of [0,1]");

  QuasiProbability out;
  out.subgroup = ch.subgroup();
  out.q.resize(ch.size());
  out.p.resize(ch.size());
  out.sign.resize(ch.size());

  double weighted = 0.0;
  for (int k = 1; k < ch.size(); ++k) weighted += r[k] * ch.prob(k);
  out.q[0] = 1.0 + weighted;
  for (int k = 1; k < ch.size(); ++k) out.q[k] = -r[k] * ch.prob(k);

  out.c_mit = 0.0;
  for (double qk : out.q) out.c_mit += std::abs(qk);
  for (int k = 0; k < ch.size(); ++k) {
    out.p[k] = std::abs(out.q[k]) / out.c_mit;
    out.sign[k] = out.q[k] < 0.0 ? -1 : 1;
  }
  return out;
}

QuasiProbability build_quasiprobability(const PauliChannel& ch, double uniform_r) {
  std::vector<double> r(ch.probs().size(), uniform_r);
  r[0] = 0.0;
  return build_quasiprobability(ch, r);
}

long MitigationPlan::default_samples() const {
  return static_cast<long>(std::ceil(90.0 * c_tot * c_tot));
}

MitigationPlan plan_decoherence_control(const std::vector<PauliChannel>& eps,
                                        const std::vector<std::vector<double>>& targets,
                                        double total_time,
                                        std::optional<double> forced_dt) {
  if (eps.size() != targets.size())
    throw std::invalid_argument("one target-rate table per channel required");
  if (!(total_time > 0.0)) throw std::invalid_argument("total time must be positive");

  // Step (a): the largest time-step with gamma_k = eps_k / dt >= Gamma_k.
  double dt_max = std::numeric_limits<double>::infinity();
  for (size_t c = 0; c < eps.size(); ++c) {
    eps[c].validate();
    if (targets[c].size() != eps[c].probs().size())
      throw std::invalid_argument("target-rate table size mismatch");
    for (int k = 1; k < eps[c].size(); ++k) {
      const double gamma = targets[c][k];
      if (gamma < 0.0) throw std::invalid_argument("target rates must be non-negative");
      if (gamma == 0.0) continue;
      if (eps[c].prob(k) <= 0.0)
        throw std::invalid_argument("device lacks noise channel " +
                                    pauli_label_of_index(k, eps[c].width()) +
                                    " required by a nonzero target rate");
      dt_max = std::min(dt_max, eps[c].prob(k) / gamma);
    }
  }

  MitigationPlan plan;
  plan.total_time = total_time;
  plan.dt_max = std::isinf(dt_max) ? 0.0 : dt_max;

  double dt_cap;
  if (forced_dt) {
    if (!(*forced_dt > 0.0)) throw std::invalid_argument("time-step must be positive");
    if (!std::isinf(dt_max) && *forced_dt > dt_max * (1.0 + 1e-12)) {
      // Name a violating channel for the error message.
      for (size_t c = 0; c < eps.size(); ++c)
        for (int k = 1; k < eps[c].size(); ++k)
          if (targets[c][k] > 0.0 && eps[c].prob(k) / targets[c][k] < *forced_dt * (1.0 - 1e-12))
            throw std::invalid_argument(
                "target rate for " + pauli_label_of_index(k, eps[c].width()) +
                " exceeds eps/dt at the fixed time-step");
      throw std::invalid_argument("fixed time-step exceeds dt_max");
    }
    dt_cap = *forced_dt;
  } else {
    if (std::isinf(dt_max))
      throw std::invalid_argument(
          "all target rates are zero; supply a time-step for the closed-system limit");
    dt_cap = dt_max;
  }

  plan.layers = std::max(1, static_cast<int>(std::ceil(total_time / dt_cap - 1e-12)));
  plan.dt = total_time / double(plan.layers);

  // Step (b): partial mitigation factors for the remaining excess rates.
  plan.c_iter = 1.0;
  for (size_t c = 0; c < eps.size(); ++c) {
    MitigationPlan::ChannelPlan cp;
    cp.eps = eps[c];
    cp.targets = targets[c];
    cp.r.assign(eps[c].size(), 1.0);
    cp.realized.assign(eps[c].size(), 0.0);
    for (int k = 1; k < eps[c].size(); ++k) {
      const double e = eps[c].prob(k);
      if (e <= 0.0) {
        cp.r[k] = 1.0;  // nothing to mitigate
        continue;
      }
      const double r = 1.0 - targets[c][k] * plan.dt / e;
      cp.r[k] = std::clamp(r, 0.0, 1.0);
      cp.realized[k] = e * (1.0 - cp.r[k]) / plan.dt;
    }
    cp.r[0] = 0.0;
    cp.quasi = build_quasiprobability(eps[c], cp.r);
    plan.c_iter *= cp.quasi.c_mit;
    plan.channels.push_back(std::move(cp));
  }
  plan.c_tot = std::pow(plan.c_iter, plan.layers);
  return plan;
}

MitigationPlan plan_from_factors(const std::vector<PauliChannel>& eps,
                                 const std::vector<std::vector<double>>& r, double dt,
                                 double total_time) {
  if (eps.size() != r.size())
    throw std::invalid_argument("one mitigation-factor table per channel required");
  if (!(dt > 0.0) || !(total_time > 0.0))
    throw std::invalid_argument("time inputs must be positive");

  MitigationPlan plan;
  plan.total_time = total_time;
  plan.dt = dt;
  plan.dt_max = 0.0;
  plan.layers = std::max(1, static_cast<int>(std::ceil(total_time / dt - 1e-12)));
  plan.c_iter = 1.0;
  for (size_t c = 0; c < eps.size(); ++c) {
    MitigationPlan::ChannelPlan cp;
    cp.eps = eps[c];
    cp.r = r[c];
    cp.r[0] = 0.0;
    cp.targets.assign(eps[c].size(), 0.0);
    cp.realized.assign(eps[c].size(), 0.0);
    for (int k = 1; k < eps[c].size(); ++k) {
      cp.realized[k] = eps[c].prob(k) * (1.0 - cp.r[k]) / dt;
      cp.targets[k] = cp.realized[k];
    }
    cp.quasi = build_quasiprobability(eps[c], cp.r);
    plan.c_iter *= cp.quasi.c_mit;
    plan.channels.push_back(std::move(cp));
  }
  plan.c_tot = std::pow(plan.c_iter, plan.layers);
  return plan;
}

InsertionSchedule sample_insertions(const MitigationPlan& plan, int n, int layers,
                                    uint64_t seed) {
  if (layers < 1) throw std::invalid_argument("layer count must be positive");
  if (plan.channels.empty()) throw std::invalid_argument("plan has no channels");
  for (const auto& cp : plan.channels)
    for (int q : cp.quasi.subgroup)
      if (q < 0 || q >= n)
        throw std::invalid_argument("plan tiling does not fit the register");

  InsertionSchedule out;
  out.per_layer.reserve(layers);
  out.layer_sign.reserve(layers);
  out.layer_weight.reserve(layers);

  std::mt19937_64 rng = rng_stream(seed, 0x9ec);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int d = 0; d < layers; ++d) {
    PauliString word = PauliString::identity(n);
    int sign = 1;
    double weight = 1.0;
    for (const auto& cp : plan.channels) {
      const auto& quasi = cp.quasi;
      const double u = unit(rng);
      double acc = 0.0;
      int pick = 0;
      for (int k = 0; k < quasi.size(); ++k) {
        acc += quasi.p[k];
        if (u <= acc || k + 1 == quasi.size()) {
          pick = k;
          break;
        }
      }
      if (pick != 0) word = word * cp.eps.embedded_word(pick, n);
      sign *= quasi.sign[pick];
      weight *= quasi.c_mit;
    }
    out.per_layer.push_back(word);
    out.layer_sign.push_back(sign);
    out.layer_weight.push_back(weight);
    out.sign *= sign;
    out.weight *= weight;
  }
  return out;
}

Estimate mitigated_expectation(std::span<const std::pair<int, double>> samples, double c_tot) {
  if (samples.size() < 2) throw std::invalid_argument("need at least two samples");
  double mean = 0.0;
  for (const auto& [sign, value] : samples) mean += c_tot * sign * value;
  mean /= double(samples.size());
  double var = 0.0;
  for (const auto& [sign, value] : samples) {
    const double d = c_tot * sign * value - mean;
    var += d * d;
  }
  var /= double(samples.size() - 1);
  return {mean, std::sqrt(var / double(samples.size()))};
}

double total_cost(double eps_r, int subgroup_count, int layers) {
  if (eps_r < 0.0) throw std::invalid_argument("eps_r must be non-negative");
  return std::pow(1.0 + 2.0 * eps_r, double(subgroup_count) * double(layers));
}

double iteration_cost(std::span<const QuasiProbability> quasis) {
  double c = 1.0;
  for (const auto& q : quasis) c *= q.c_mit;
  return c;
}

double max_error_budget(double gamma_total, double total_time, int layers, int n, double lambda,
                        double m_max) {
  if (!(gamma_total > 0.0) || !(total_time > 0.0) || layers < 1 || n < 1 || !(lambda > 0.0) ||
      !(m_max >= 1.0))
    throw std::invalid_argument("max_error_budget: inputs must be positive");
  return gamma_total * total_time / double(layers) +
         std::log(m_max) / (2.0 * lambda * double(n) * double(layers) * double(layers));
}

SlopeFit fit_log_slope(std::span<const double> depths, std::span<const double> c_tot) {
  if (depths.size() != c_tot.size() || depths.size() < 3)
    throw std::invalid_argument("slope fit needs at least three points");
  const double count = double(depths.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t j = 0; j < depths.size(); ++j) {
    if (!(c_tot[j] > 0.0)) throw std::invalid_argument("cost values must be positive");
    const double y = std::log(c_tot[j]);
    sx += depths[j];
    sy += y;
    sxx += depths[j] * depths[j];
    sxy += depths[j] * y;
  }
  const double det = count * sxx - sx * sx;
  if (std::abs(det) < 1e-30) throw std::invalid_argument("degenerate depth series");
  SlopeFit fit;
  fit.slope = (count * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / count;
  double rss = 0.0;
  for (size_t j = 0; j < depths.size(); ++j) {
    const double r = std::log(c_tot[j]) - (fit.intercept + fit.slope * depths[j]);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / count);
  return fit;
}

CostScalingFit fit_cost_scaling(std::span<const CostSeries> series,
                                std::span<const double> n_eps_r) {
  if (series.size() != n_eps_r.size())
    throw std::invalid_argument("one n*eps_r value per series required");
  CostScalingFit out;
  double num = 0.0, den = 0.0;
  for (size_t s = 0; s < series.size(); ++s) {
    out.series.push_back(fit_log_slope(series[s].depths, series[s].c_tot));
    num += out.series.back().slope * n_eps_r[s];
    den += n_eps_r[s] * n_eps_r[s];
  }
  if (den <= 0.0) throw std::invalid_argument("degenerate lambda regression");
  out.lambda = num / den;
  return out;
}

DampingSchedule schedule_resets(std::span<const double> gamma_ad, double dt, double p_er) {
  if (!(dt > 0.0)) throw std::invalid_argument("time-step must be positive");
  DampingSchedule out;
  const int n = static_cast<int>(gamma_ad.size());
  for (int q = 0; q < n; ++q) {
    if (gamma_ad[q] < 0.0) throw std::invalid_argument("damping rate must be non-negative");
    if (gamma_ad[q] == 0.0) continue;
    const double w = gamma_ad[q] * dt / (1.0 - p_er);
    if (w > 1.0)
      throw std::invalid_argument("damping rate too high for this time-step");
    out.slots.push_back(GateOp::reset(q, w));
    const double w_eff = w * (1.0 - p_er);
    out.byproduct.push_back(PauliChannel::from_error_probs(
        {q}, {{"Z", reset_dephasing_probability(w_eff)}}));
  }
  return out;
}

}  // namespace noiseforge
