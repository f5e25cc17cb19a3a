#include "noiseforge/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "noiseforge/characterization.hpp"
#include "noiseforge/parallel.hpp"
#include "noiseforge/report.hpp"

namespace noiseforge {

namespace {

namespace fs = std::filesystem;

std::string out_path(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  return (fs::path(dir) / name).string();
}

TrotterPlan trotter_plan_for(const ExperimentConfig& cfg, double dt, int layers) {
  TrotterPlan plan;
  plan.order = cfg.trotter_order;
  plan.dt = dt;
  plan.layers = layers;
  plan.validate();
  return plan;
}

// Assemble the plan the mitigate mode runs: device channels with the
// configured factors or targets, plus byproduct dephasing channels of any
// damping resets at full mitigation.
struct MitigateSetup {
  MitigationPlan plan;
  std::vector<GateOp> reset_slots;
};

std::vector<double> expand_rate_map_for(const std::vector<StringRateMap>& maps,
                                        const PauliChannel& ch, double fallback) {
  // A subgroup-specific map wins; a map without a subgroup applies to every
  // channel; otherwise the uniform fallback.
  const StringRateMap* wildcard = nullptr;
  for (const auto& m : maps) {
    if (m.subgroup == ch.subgroup()) return m.expand(ch.width());
    if (m.subgroup.empty()) wildcard = &m;
  }
  if (wildcard) return wildcard->expand(ch.width());
  return std::vector<double>(ch.probs().size(), fallback);
}

MitigateSetup build_mitigate_setup(const ExperimentConfig& cfg) {
  if (!(cfg.trotter_dt > 0.0) && cfg.pec.target_rates.empty() && cfg.pec.plan_file.empty())
    throw std::invalid_argument("mitigate mode needs trotter.dt, targets, or a plan file");

  MitigateSetup setup;

  std::vector<PauliChannel> channels = cfg.device.channels;
  double dt = cfg.trotter_dt;

  if (!cfg.pec.plan_file.empty()) {
    setup.plan = load_plan(cfg.pec.plan_file);
    dt = setup.plan.dt;
    if (!cfg.damping_rates.empty()) {
      DampingSchedule damping = schedule_resets(cfg.damping_rates, dt, cfg.device.reset_error);
      setup.reset_slots = damping.slots;
      for (const auto& by : damping.byproduct) {
        MitigationPlan::ChannelPlan cp;
        cp.eps = by;
        cp.r.assign(by.probs().size(), 1.0);
        cp.r[0] = 0.0;
        cp.targets.assign(by.probs().size(), 0.0);
        cp.realized.assign(by.probs().size(), 0.0);
        cp.quasi = build_quasiprobability(by, cp.r);
        setup.plan.c_iter *= cp.quasi.c_mit;
        setup.plan.channels.push_back(std::move(cp));
      }
      setup.plan.c_tot = std::pow(setup.plan.c_iter, setup.plan.layers);
    }
    return setup;
  }

  // Damping resets fix their byproduct channels once dt is known; when dt is
  // driven by targets we resolve it first with the Pauli channels only.
  std::vector<std::vector<double>> tables;
  const bool by_targets = !cfg.pec.target_rates.empty();
  if (by_targets) {
    for (const auto& ch : channels) {
      std::vector<double> rates(ch.probs().size(), 0.0);
      for (const auto& m : cfg.pec.target_rates)
        if (m.subgroup.empty() || m.subgroup == ch.subgroup()) rates = m.expand(ch.width());
      tables.push_back(std::move(rates));
    }
    MitigationPlan pauli_plan = plan_decoherence_control(
        channels, tables, cfg.run.time,
        cfg.trotter_dt > 0.0 ? std::optional<double>(cfg.trotter_dt) : std::nullopt);
    dt = pauli_plan.dt;
  }
  if (!(dt > 0.0)) throw std::invalid_argument("mitigate mode could not resolve a time-step");

  DampingSchedule damping;
  if (!cfg.damping_rates.empty()) {
    damping = schedule_resets(cfg.damping_rates, dt, cfg.device.reset_error);
    setup.reset_slots = damping.slots;
  }

  if (by_targets) {
    for (const auto& by : damping.byproduct) {
      channels.push_back(by);
      tables.push_back(std::vector<double>(by.probs().size(), 0.0));
    }
    setup.plan = plan_decoherence_control(channels, tables, cfg.run.time,
                                          std::optional<double>(dt));
  } else {
    const double fallback = cfg.pec.uniform_r.value_or(0.0);
    std::vector<std::vector<double>> factors;
    for (const auto& ch : channels)
      factors.push_back(expand_rate_map_for(cfg.pec.r_maps, ch, fallback));
    for (const auto& by : damping.byproduct) {
      channels.push_back(by);
      factors.push_back(std::vector<double>(by.probs().size(), 1.0));
    }
    setup.plan = plan_from_factors(channels, factors, dt, cfg.run.time);
  }
  return setup;
}

std::vector<SeriesRow> series_rows(const std::vector<double>& times,
                                   const std::vector<std::vector<double>>& values,
                                   const std::vector<std::vector<double>>& errors,
                                   const std::vector<double>* eta, int n) {
  std::vector<SeriesRow> rows;
  for (size_t t = 0; t < times.size(); ++t) {
    for (size_t j = 0; j < values[t].size(); ++j) {
      SeriesRow row;
      row.time = times[t];
      row.label = population_label(n, static_cast<int64_t>(j));
      row.value = values[t][j];
      row.stderr = errors.empty() ? 0.0 : errors[t][j];
      if (eta) {
        row.has_eta = true;
        row.eta = (*eta)[t];
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void plot_populations(const std::string& path, const std::string& title,
                      const std::vector<double>& times,
                      const std::vector<std::vector<double>>& values, int n) {
  std::vector<PlotSeries> series(values.empty() ? 0 : values[0].size());
  for (size_t j = 0; j < series.size(); ++j) {
    series[j].name = population_label(n, static_cast<int64_t>(j));
    for (size_t t = 0; t < times.size(); ++t) {
      series[j].x.push_back(times[t]);
      series[j].y.push_back(values[t][j]);
    }
  }
  write_svg_plot(path, title, "time", "population", series);
}

PipelineResult run_characterize(const ExperimentConfig& cfg, const std::string& dir, bool svg,
                                uint64_t hash) {
  const Hamiltonian h = cfg.hamiltonian.build();
  const TrotterCircuit layer = build_trotter_layer(h, trotter_plan_for(cfg, cfg.trotter_dt, 1));
  const TrotterCircuit variant = make_clifford_identity_variant(layer);

  std::vector<std::vector<int>> subgroups;
  for (const auto& ch : cfg.device.channels) subgroups.push_back(ch.subgroup());
  if (subgroups.empty()) subgroups = default_pair_tiling(cfg.hamiltonian.n);

  PipelineResult result;
  std::vector<std::vector<std::string>> decay_rows, fit_rows;
  std::string channels_json = "[\n";
  for (size_t s = 0; s < subgroups.size(); ++s) {
    CBConfig cb;
    cb.depths = cfg.cb.depths;
    cb.shots = cfg.cb.shots;
    cb.twirl_copies = cfg.cb.twirl_copies;
    cb.subgroup = subgroups[s];
    cb.seed = mix_seed(cfg.run.seed, 0xcb00 + s);
    const FidelityEstimate fit = run_cycle_benchmark(cfg.device, variant, cb);
    const PauliChannel reconstructed =
        reconstruct_error_probabilities(fit, static_cast<int>(subgroups[s].size()));

    std::string subgroup_text;
    for (size_t q = 0; q < subgroups[s].size(); ++q)
      subgroup_text += (q ? "-" : "") + std::to_string(subgroups[s][q]);
    for (const auto& probe : fit.probes) {
      const std::string label = pauli_label_of_index(probe.index, int(fit.subgroup.size()));
      for (size_t d = 0; d < fit.depths.size(); ++d)
        decay_rows.push_back({subgroup_text, label, std::to_string(fit.depths[d]),
                              format_double(probe.decay[d]),
                              format_double(probe.decay_stderr[d])});
      fit_rows.push_back({subgroup_text, label, format_double(probe.fidelity),
                          format_double(probe.amplitude), format_double(probe.residual),
                          format_double(probe.stderr), probe.crossed_zero ? "1" : "0"});
    }
    channels_json += channel_spec_json(reconstructed);
    channels_json += (s + 1 < subgroups.size()) ? ",\n" : "\n";

    if (svg) {
      std::vector<PlotSeries> plots;
      for (const auto& probe : fit.probes) {
        PlotSeries p;
        p.name = pauli_label_of_index(probe.index, int(fit.subgroup.size()));
        for (size_t d = 0; d < fit.depths.size(); ++d) {
          p.x.push_back(fit.depths[d]);
          p.y.push_back(probe.decay[d]);
        }
        plots.push_back(std::move(p));
      }
      const std::string path = out_path(dir, "decays_" + subgroup_text + ".svg");
      write_svg_plot(path, "cycle benchmark decays, qubits " + subgroup_text, "depth m",
                     "<a>(m)", plots);
      result.artifacts.push_back(path);
    }
  }
  channels_json += "]\n";

  const std::string decays = out_path(dir, "decays.csv");
  write_table_csv(decays, hash, cfg.run.seed, {"subgroup", "probe", "depth", "value", "stderr"},
                  decay_rows);
  const std::string fits = out_path(dir, "fidelities.csv");
  write_table_csv(fits, hash, cfg.run.seed,
                  {"subgroup", "probe", "fidelity", "amplitude", "residual", "stderr",
                   "crossed_zero"},
                  fit_rows);
  const std::string channels = out_path(dir, "channels.json");
  {
    std::ofstream out(channels, std::ios::binary);
    out << channels_json;
  }
  result.artifacts.insert(result.artifacts.begin(), {decays, fits, channels});
  return result;
}

PipelineResult run_plan_mode(const ExperimentConfig& cfg, const std::string& dir,
                             uint64_t hash) {
  (void)hash;
  MitigateSetup setup = build_mitigate_setup(cfg);
  const std::string path = out_path(dir, "plan.json");
  save_plan(path, setup.plan);
  return {{path}};
}

PipelineResult run_simulate(const ExperimentConfig& cfg, const std::string& dir, bool svg,
                            uint64_t hash) {
  const Hamiltonian h = cfg.hamiltonian.build();
  if (!(cfg.trotter_dt > 0.0))
    throw std::invalid_argument("simulate mode needs trotter.dt");
  const int layers =
      std::max(1, static_cast<int>(std::ceil(cfg.run.time / cfg.trotter_dt - 1e-12)));
  const double dt = cfg.run.time / layers;

  TrotterCircuit layer = build_trotter_layer(h, trotter_plan_for(cfg, dt, layers));
  DampingSchedule damping;
  if (!cfg.damping_rates.empty()) {
    damping = schedule_resets(cfg.damping_rates, dt, cfg.device.reset_error);
    layer.resets = damping.slots;
  }

  const DensityMatrix initial = DensityMatrix::computational(
      cfg.hamiltonian.n, uint64_t{1} << (cfg.hamiltonian.n - 1));  // |1,0,...,0>

  ExecOptions opts;
  opts.mode = cfg.run.shots > 0 ? ExecMode::Sampled : ExecMode::Exact;
  opts.shots = cfg.run.shots;
  opts.twirl = cfg.device.coherent_theta != 0.0;
  opts.seed = cfg.run.seed;
  const ExecutionResult run = execute(layer, layers, cfg.device, initial, opts);
  const std::vector<std::vector<double>> pops = run.populations();

  std::vector<std::vector<double>> errors;
  if (opts.mode == ExecMode::Sampled) {
    errors.assign(pops.size(), std::vector<double>(pops[0].size(), 0.0));
    for (size_t t = 0; t < pops.size(); ++t)
      for (size_t j = 0; j < pops[t].size(); ++j)
        errors[t][j] = std::sqrt(std::max(0.0, pops[t][j] * (1.0 - pops[t][j]) /
                                                   double(cfg.run.shots)));
  }

  std::vector<double> eta;
  TimeSeries ref_series;
  const bool with_reference = cfg.run.reference;
  if (with_reference) {
    LindbladSpec spec;
    for (const auto& ch : cfg.device.channels)
      spec.merge(channel_to_dissipator(ch, dt, cfg.hamiltonian.n));
    for (const auto& slot : layer.resets) {
      ResetSpec rs;
      rs.qubit = slot.q0;
      rs.prob = slot.prob;
      rs.p_er = cfg.device.reset_error;
      spec.merge(channel_to_dissipator(rs, dt, cfg.hamiltonian.n));
    }
    LindbladRun ref;
    ref.hamiltonian = h;
    ref.dissipators = spec;
    ref.initial = initial;
    ref.total_time = cfg.run.time;
    const int stride = cfg.run.rk4_dt > 0.0
                           ? std::max(1, static_cast<int>(std::llround(dt / cfg.run.rk4_dt)))
                           : 20;
    ref.dt = dt / stride;
    ref.output_stride = stride;
    ref_series = rk4_propagate(ref);
    eta = eta_metric(pops, ref_series);
  }

  const std::vector<SeriesRow> rows =
      series_rows(run.times, pops, errors, with_reference ? &eta : nullptr, cfg.hamiltonian.n);
  const std::string csv = out_path(dir, "timeseries.csv");
  write_series_csv(csv, hash, cfg.run.seed, rows);
  PipelineResult result{{csv}};
  if (with_reference) {
    std::vector<std::vector<double>> ref_pops;
    for (const auto& state : ref_series.states) ref_pops.push_back(state.populations());
    const std::string ref_csv = out_path(dir, "reference.csv");
    write_series_csv(ref_csv, hash, cfg.run.seed,
                     series_rows(ref_series.times, ref_pops, {}, nullptr, cfg.hamiltonian.n));
    result.artifacts.push_back(ref_csv);
  }
  if (svg) {
    const std::string plot = out_path(dir, "timeseries.svg");
    plot_populations(plot, "population dynamics", run.times, pops, cfg.hamiltonian.n);
    result.artifacts.push_back(plot);
  }
  return result;
}

PipelineResult run_mitigate(const ExperimentConfig& cfg, const std::string& dir, bool svg,
                            uint64_t hash) {
  const Hamiltonian h = cfg.hamiltonian.build();
  MitigateSetup setup = build_mitigate_setup(cfg);
  const MitigationPlan& plan = setup.plan;

  TrotterCircuit layer = build_trotter_layer(h, trotter_plan_for(cfg, plan.dt, plan.layers));
  layer.resets = setup.reset_slots;

  const DensityMatrix initial = DensityMatrix::computational(
      cfg.hamiltonian.n, uint64_t{1} << (cfg.hamiltonian.n - 1));

  const long samples = cfg.pec.samples > 0 ? cfg.pec.samples : plan.default_samples();
  const MitigatedSeries series =
      run_pec_series(layer, cfg.device, initial, plan, samples, cfg.run.seed);

  std::vector<double> eta;
  TimeSeries ref_series;
  if (cfg.run.reference) {
    LindbladRun ref;
    ref.hamiltonian = h;
    ref.dissipators = plan_reference_dissipator(plan, cfg.hamiltonian.n, layer.resets,
                                                cfg.device.reset_error);
    ref.initial = initial;
    ref.total_time = plan.dt * plan.layers;
    const int stride = cfg.run.rk4_dt > 0.0
                           ? std::max(1, static_cast<int>(std::llround(plan.dt / cfg.run.rk4_dt)))
                           : 20;
    ref.dt = plan.dt / stride;
    ref.output_stride = stride;
    ref_series = rk4_propagate(ref);
    eta = eta_metric(series.mean, ref_series);
  }

  const std::vector<SeriesRow> rows = series_rows(
      series.times, series.mean, series.stderr, cfg.run.reference ? &eta : nullptr,
      cfg.hamiltonian.n);
  const std::string csv = out_path(dir, "timeseries.csv");
  write_series_csv(csv, hash, cfg.run.seed, rows);
  const std::string plan_path = out_path(dir, "plan.json");
  save_plan(plan_path, plan);
  PipelineResult result{{csv, plan_path}};
  if (cfg.run.reference) {
    std::vector<std::vector<double>> ref_pops;
    for (const auto& state : ref_series.states) ref_pops.push_back(state.populations());
    const std::string ref_csv = out_path(dir, "reference.csv");
    write_series_csv(ref_csv, hash, cfg.run.seed,
                     series_rows(ref_series.times, ref_pops, {}, nullptr, cfg.hamiltonian.n));
    result.artifacts.push_back(ref_csv);
  }
  if (svg) {
    const std::string plot = out_path(dir, "timeseries.svg");
    plot_populations(plot, "mitigated population dynamics", series.times, series.mean,
                     cfg.hamiltonian.n);
    result.artifacts.push_back(plot);
  }
  return result;
}

PipelineResult run_cost(const ExperimentConfig& cfg, const std::string& dir, bool svg,
                        uint64_t hash) {
  std::vector<std::vector<std::string>> rows;
  std::vector<PlotSeries> plots;
  for (int n : cfg.cost.qubit_counts) {
    for (double r : cfg.cost.factors) {
      PlotSeries plot;
      plot.name = "n=" + std::to_string(n) + " r=" + format_double(r);
      for (int depth : cfg.cost.depths) {
        std::vector<QuasiProbability> quasis;
        double eps_r = 0.0;
        for (const auto& subgroup : default_pair_tiling(n)) {
          const PauliChannel ch =
              PauliChannel::uniform_error(subgroup, cfg.cost.eps_per_string);
          quasis.push_back(build_quasiprobability(ch, r));
          eps_r = r * ch.error_total();
        }
        const double c_iter = iteration_cost(quasis);
        const double c_tot = std::pow(c_iter, depth);
        const double m_required = std::ceil(90.0 * c_tot * c_tot);
        rows.push_back({std::to_string(n), std::to_string(depth), format_double(r),
                        format_double(eps_r), format_double(c_iter), format_double(c_tot),
                        format_double(m_required)});
        plot.x.push_back(depth);
        plot.y.push_back(std::log10(c_tot));
      }
      plots.push_back(std::move(plot));
    }
  }
  const std::string csv = out_path(dir, "cost.csv");
  write_table_csv(csv, hash, cfg.run.seed,
                  {"n", "D", "r", "epsilon_r", "C_iter", "C_tot", "M_required"}, rows);
  PipelineResult result{{csv}};
  if (svg) {
    const std::string plot = out_path(dir, "cost.svg");
    write_svg_plot(plot, "total mitigation cost", "Trotter layers D", "log10 C_tot", plots);
    result.artifacts.push_back(plot);
  }
  return result;
}

}  // namespace

std::string population_label(int n, int64_t basis_index) {
  std::string label = "p";
  for (int q = 0; q < n; ++q)
    label += (basis_index >> (n - 1 - q)) & 1 ? '1' : '0';
  return label;
}

LindbladSpec plan_reference_dissipator(const MitigationPlan& plan, int n,
                                       const std::vector<GateOp>& reset_slots,
                                       double reset_error) {
  LindbladSpec spec;
  for (const auto& cp : plan.channels) {
    for (int k = 1; k < cp.eps.size(); ++k) {
      if (cp.realized[k] <= 0.0) continue;
      spec.pauli.push_back({cp.eps.embedded_word(k, n), cp.realized[k]});
    }
  }
  for (const auto& slot : reset_slots) {
    // Damping component only; the dephasing byproduct is carried by the
    // plan's byproduct channels.
    const double w_eff = slot.prob * (1.0 - reset_error);
    if (w_eff > 0.0) spec.damping.push_back({slot.q0, w_eff / plan.dt});
  }
  return spec;
}

MitigatedSeries run_pec_series(const TrotterCircuit& layer, const DeviceModel& model,
                               const DensityMatrix& initial, const MitigationPlan& plan,
                               long samples, uint64_t seed, PecEstimator estimator) {
  if (samples < 2) throw std::invalid_argument("need at least two PEC samples");
  const int layers = plan.layers;
  const int64_t dim = initial.dim();
  const size_t cells = size_t(layers + 1) * size_t(dim);

  const bool twirl = model.coherent_theta != 0.0;
  Eigen::MatrixXcd unitary;
  if (!twirl) unitary = noisy_layer_unitary(layer, model.coherent_theta);
  const Eigen::MatrixXcd* cached = twirl ? nullptr : &unitary;

  // Reference level subtracted per sample: the identity component alone
  // (Plain) or the full unmitigated trajectory (ControlVariate).
  std::vector<double> base(cells, 1.0 / double(dim));
  if (estimator == PecEstimator::ControlVariate) {
    ExecOptions opts;
    opts.mode = ExecMode::Exact;
    opts.twirl = twirl;
    opts.seed = mix_seed(seed, 0xba5e);
    const ExecutionResult baseline = execute(layer, layers, model, initial, opts, nullptr, cached);
    for (int d = 0; d <= layers; ++d) {
      const auto pops = baseline.states[d].populations();
      for (int64_t j = 0; j < dim; ++j) base[size_t(d) * dim + j] = pops[j];
    }
  }

  // Fixed chunk layout keeps the reduction order independent of the pool size.
  const int chunks = 64;
  std::vector<std::vector<double>> sum(chunks), sumsq(chunks);
  for (int c = 0; c < chunks; ++c) {
    sum[c].assign(cells, 0.0);
    sumsq[c].assign(cells, 0.0);
  }

  parallel_for(chunks, [&](int64_t chunk) {
    auto& s = sum[chunk];
    auto& s2 = sumsq[chunk];
    for (long i = chunk; i < samples; i += chunks) {
      const InsertionSchedule ins =
          sample_insertions(plan, model.n, layers, mix_seed(seed, 0x5ec0000 + i));
      ExecOptions opts;
      opts.mode = ExecMode::Exact;
      opts.twirl = twirl;
      opts.seed = mix_seed(seed, 0x7a30000 + i);
      const ExecutionResult run = execute(layer, layers, model, initial, opts, &ins, cached);
      double cum_weight = 1.0;
      int cum_sign = 1;
      for (int d = 0; d <= layers; ++d) {
        if (d > 0) {
          cum_weight *= ins.layer_weight[d - 1];
          cum_sign *= ins.layer_sign[d - 1];
        }
        const auto pops = run.states[d].populations();
        for (int64_t j = 0; j < dim; ++j) {
          const double v =
              cum_weight * cum_sign * (pops[j] - base[size_t(d) * dim + j]);
          s[size_t(d) * dim + j] += v;
          s2[size_t(d) * dim + j] += v * v;
        }
      }
    }
  });

  MitigatedSeries out;
  out.samples = samples;
  out.times.resize(layers + 1);
  out.mean.assign(layers + 1, std::vector<double>(dim, 0.0));
  out.stderr.assign(layers + 1, std::vector<double>(dim, 0.0));
  for (int d = 0; d <= layers; ++d) out.times[d] = plan.dt * double(d);
  for (int d = 0; d <= layers; ++d) {
    for (int64_t j = 0; j < dim; ++j) {
      double s = 0.0, s2 = 0.0;
      for (int c = 0; c < chunks; ++c) {
        s += sum[c][size_t(d) * dim + j];
        s2 += sumsq[c][size_t(d) * dim + j];
      }
      const double mean = s / double(samples);
      const double var = std::max(0.0, (s2 - double(samples) * mean * mean) /
                                           double(samples - 1));
      out.mean[d][j] = base[size_t(d) * dim + j] + mean;
      out.stderr[d][j] = std::sqrt(var / double(samples));
    }
  }
  return out;
}

PipelineResult run_pipeline(const ExperimentConfig& cfg, const std::string& out_dir, bool svg) {
  const uint64_t hash = fnv1a_hash(cfg.raw_json);
  switch (cfg.mode) {
    case RunMode::Characterize: return run_characterize(cfg, out_dir, svg, hash);
    case RunMode::Plan: return run_plan_mode(cfg, out_dir, hash);
    case RunMode::Simulate: return run_simulate(cfg, out_dir, svg, hash);
    case RunMode::Mitigate: return run_mitigate(cfg, out_dir, svg, hash);
    case RunMode::Cost: return run_cost(cfg, out_dir, svg, hash);
  }
  throw std::logic_error("unknown pipeline mode");
}

}  // namespace noiseforge
