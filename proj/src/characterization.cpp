#include "noiseforge/characterization.hpp"

#include <cmath>
#include <stdexcept>

#include "noiseforge/parallel.hpp"

namespace noiseforge {

void CBConfig::validate() const {
  if (depths.size() < 2) throw std::invalid_argument("cycle benchmark needs >= 2 depths");
  for (size_t j = 1; j < depths.size(); ++j)
    if (depths[j] <= depths[j - 1])
      throw std::invalid_argument("depths must be strictly increasing");
  if (depths.front() < 1) throw std::invalid_argument("depths must be positive");
  if (subgroup.empty() || subgroup.size() > 3)
    throw std::invalid_argument("probe subgroup width must be 1..3");
  if (twirl_copies < 1) throw std::invalid_argument("need at least one twirl copy");
  if (shots < 0) throw std::invalid_argument("shot count must be non-negative");
}

const ProbeFit& FidelityEstimate::probe(int index) const {
  for (const auto& p : probes)
    if (p.index == index) return p;
  throw std::invalid_argument("probe index not present in the estimate");
}

TrotterCircuit make_clifford_identity_variant(const TrotterCircuit& layer) {
  TrotterCircuit out = layer;
  for (auto& g : out.gates) {
    switch (g.kind) {
      case GateKind::RotZ:
        g.angle = 0.0;
        break;
      case GateKind::RotX:
      case GateKind::RotY:
        throw std::invalid_argument(
            "identity variant requires all parameterized gates to be Z rotations");
      default:
        break;
    }
  }
  return out;
}

double pauli_fidelity(const PauliChannel& ch, const PauliString& probe) {
  if (probe.size() != ch.width())
    throw std::invalid_argument("probe width must match the channel subgroup");
  double f = 0.0;
  for (int k = 0; k < ch.size(); ++k) {
    const double eps = ch.prob(k);
    if (eps == 0.0) continue;
    const PauliString word = PauliString::from_label(pauli_label_of_index(k, ch.width()));
    f += eps * probe.commute_sign(word);
  }
  return f;
}

namespace {

// Product eigenstate of a probe word: |+>, |+i>, |0> per letter (|0> for I).
DensityMatrix probe_eigenstate(const PauliString& probe_full) {
  std::string letters(probe_full.size(), '0');
  for (int m = 0; m < probe_full.size(); ++m) {
    switch (probe_full.letter(m)) {
      case 'X': letters[m] = '+'; break;
      case 'Y': letters[m] = 'r'; break;
      default: letters[m] = '0'; break;
    }
  }
  return DensityMatrix::product_state(std::span<const char>(letters.data(), letters.size()));
}

struct DecayPoint {
  double value = 0.0;
  double stderr = 0.0;
};

DecayPoint measure_decay(const DeviceModel& model, const TrotterCircuit& layer_v,
                         const PauliString& probe_full, int depth, long shots, int copies,
                         uint64_t seed) {
  const DensityMatrix rho0 = probe_eigenstate(probe_full);
  double mean = 0.0;
  double var = 0.0;
  const long shots_per_copy = shots > 0 ? std::max<long>(1, shots / copies) : 0;
  for (int c = 0; c < copies; ++c) {
    ExecOptions opts;
    opts.mode = ExecMode::Exact;
    opts.twirl = true;
    opts.record_series = false;
    opts.seed = mix_seed(seed, 0x5a00 + c);
    const ExecutionResult run = execute(layer_v, depth, model, rho0, opts);
    const Measurement m =
        measure_pauli(run, model, probe_full, shots_per_copy, mix_seed(seed, 0x6b00 + c));
    mean += m.value;
    var += m.stderr * m.stderr;
  }
  mean /= double(copies);
  return {mean, std::sqrt(var) / double(copies)};
}

}  // namespace

FidelityEstimate run_cycle_benchmark(const DeviceModel& model, const TrotterCircuit& layer_v,
                                     const CBConfig& cfg) {
  cfg.validate();
  model.validate();
  const int k = static_cast<int>(cfg.subgroup.size());
  std::vector<int> probes = cfg.probes;
  if (probes.empty())
    for (int j = 1; j < (1 << (2 * k)); ++j) probes.push_back(j);

  FidelityEstimate out;
  out.subgroup = cfg.subgroup;
  out.depths = cfg.depths;
  out.probes.resize(probes.size());

  parallel_for(static_cast<int64_t>(probes.size()), [&](int64_t j) {
    const int probe_index = probes[j];
    const PauliString local =
        PauliString::from_label(pauli_label_of_index(probe_index, k));
    const PauliString full = local.embedded(model.n, cfg.subgroup);

    ProbeFit fit;
    fit.index = probe_index;
    fit.decay.resize(cfg.depths.size());
    fit.decay_stderr.resize(cfg.depths.size());
    for (size_t d = 0; d < cfg.depths.size(); ++d) {
      const DecayPoint point =
          measure_decay(model, layer_v, full, cfg.depths[d], cfg.shots, cfg.twirl_copies,
                        mix_seed(cfg.seed, (j << 8) | d));
      fit.decay[d] = point.value;
      fit.decay_stderr[d] = point.stderr;
    }

    // Log-linear least squares on the magnitudes; points at or below zero
    // are flagged and skipped.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int used = 0;
    for (size_t d = 0; d < cfg.depths.size(); ++d) {
      if (fit.decay[d] <= 0.0) {
        fit.crossed_zero = true;
        continue;
      }
      const double x = cfg.depths[d];
      const double y = std::log(std::abs(fit.decay[d]));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++used;
    }
    if (used < 2) {
      fit.fidelity = 0.0;
      fit.amplitude = 0.0;
      fit.crossed_zero = true;
      out.probes[j] = std::move(fit);
      return;
    }
    const double det = used * sxx - sx * sx;
    const double slope = (used * sxy - sx * sy) / det;
    const double intercept = (sy - slope * sx) / used;
    fit.fidelity = std::exp(slope);
    fit.amplitude = std::exp(intercept);

    double rss = 0.0;
    double var_slope = 0.0;
    const double xbar = sx / used;
    const double sxx_c = sxx - sx * sx / used;
    for (size_t d = 0; d < cfg.depths.size(); ++d) {
      if (fit.decay[d] <= 0.0) continue;
      const double r = std::log(fit.decay[d]) - (intercept + slope * cfg.depths[d]);
      rss += r * r;
      // Propagate the known per-point stderr through the log transform.
      const double sigma_log = fit.decay_stderr[d] / std::abs(fit.decay[d]);
      const double w = (cfg.depths[d] - xbar) / sxx_c;
      var_slope += w * w * sigma_log * sigma_log;
    }
    fit.residual = std::sqrt(rss / used);
    fit.stderr = fit.fidelity * std::sqrt(var_slope);
    out.probes[j] = std::move(fit);
  });
  return out;
}

PauliChannel reconstruct_error_probabilities(const FidelityEstimate& fit, int width) {
  if (width < 1 || width > 3) throw std::invalid_argument("subgroup width must be 1..3");
  const int count = 1 << (2 * width);
  std::vector<double> fidelities(count, 1.0);  // identity probe pinned at 1
  std::vector<bool> seen(count, false);
  seen[0] = true;
  for (const auto& p : fit.probes) {
    if (p.index <= 0 || p.index >= count)
      throw std::invalid_argument("probe index out of range for the subgroup width");
    fidelities[p.index] = p.fidelity;
    seen[p.index] = true;
  }
  for (int a = 0; a < count; ++a)
    if (!seen[a])
      throw std::invalid_argument("missing probe " + pauli_label_of_index(a, width));

  std::vector<PauliString> words;
  words.reserve(count);
  for (int a = 0; a < count; ++a)
    words.push_back(PauliString::from_label(pauli_label_of_index(a, width)));

  std::vector<double> probs(count, 0.0);
  const double norm = 1.0 / double(count);
  for (int k = 0; k < count; ++k) {
    double acc = 0.0;
    for (int a = 0; a < count; ++a) acc += words[a].commute_sign(words[k]) * fidelities[a];
    probs[k] = norm * acc;
  }

  // Negatives within error bars are clamped to zero, then renormalized.
  return PauliChannel::clamped_normalized(fit.subgroup, std::move(probs));
}

}  // namespace noiseforge
