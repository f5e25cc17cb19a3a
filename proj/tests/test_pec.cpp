#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "noiseforge/pec.hpp"
#include "noiseforge/runner.hpp"
#include "oracles.hpp"

using namespace noiseforge;

namespace {

Hamiltonian molecular_chain2() {
  ChainParams p;
  p.n = 2;
  p.site_energies = {121.5, 121.0};
  p.couplings = {0.5};
  return build_chain_hamiltonian(p);
}

}  // namespace

TEST_CASE("quasiprobability construction") {
  // no mitigation
  const PauliChannel ch = PauliChannel::from_error_probs({0}, {{"X", 0.01}, {"Z", 0.02}});
  const QuasiProbability none = build_quasiprobability(ch, 0.0);
  CHECK(none.q[0] == doctest::Approx(1.0));
  CHECK(none.c_mit == doctest::Approx(1.0));
  CHECK(none.p[0] == doctest::Approx(1.0));

  // full mitigation of eps = {X:0.01, Z:0.02}
  const QuasiProbability full = build_quasiprobability(ch, 1.0);
  CHECK(full.q[0] == doctest::Approx(1.03));
  CHECK(full.c_mit == doctest::Approx(1.06));
  CHECK(full.p[pauli_index_of_label("X")] == doctest::Approx(0.01 / 1.06));
  CHECK(full.sign[pauli_index_of_label("X")] == -1);

  // half mitigation
  const QuasiProbability half = build_quasiprobability(ch, 0.5);
  CHECK(half.c_mit == doctest::Approx(1.03));
  CHECK(half.q[pauli_index_of_label("X")] == doctest::Approx(-0.005));

  // probabilities normalize
  double total = 0.0;
  for (double p : full.p) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> bad(4, 2.0);
  CHECK_THROWS_AS(build_quasiprobability(ch, bad), std::invalid_argument);
}

TEST_CASE("decoherence control planning") {
  // boundary case: dt_max binds exactly
  const PauliChannel ch = PauliChannel::from_error_probs({0}, {{"Z", 0.02}});
  std::vector<double> targets(4, 0.0);
  targets[pauli_index_of_label("Z")] = 0.1;
  const MitigationPlan plan = plan_decoherence_control({ch}, {targets}, 2.0);
  CHECK(plan.dt_max == doctest::Approx(0.2));
  CHECK(plan.layers == 10);
  CHECK(plan.dt == doctest::Approx(0.2));
  CHECK(plan.channels[0].r[pauli_index_of_label("Z")] == doctest::Approx(0.0));

  // forced smaller step: r = 1 - Gamma dt / eps = 0.5
  const MitigationPlan forced = plan_decoherence_control({ch}, {targets}, 2.0, 0.1);
  CHECK(forced.channels[0].r[pauli_index_of_label("Z")] == doctest::Approx(0.5));
  CHECK(forced.channels[0].realized[pauli_index_of_label("Z")] == doctest::Approx(0.1));

  // zero targets: full mitigation, step must be supplied
  const std::vector<double> zero(4, 0.0);
  const MitigationPlan closed = plan_decoherence_control({ch}, {zero}, 2.0, 0.1);
  CHECK(closed.channels[0].r[pauli_index_of_label("Z")] == doctest::Approx(1.0));
  CHECK_THROWS_AS(plan_decoherence_control({ch}, {zero}, 2.0), std::invalid_argument);

  // a target on a channel the device lacks
  std::vector<double> missing(4, 0.0);
  missing[pauli_index_of_label("X")] = 0.1;
  CHECK_THROWS_AS(plan_decoherence_control({ch}, {missing}, 2.0), std::invalid_argument);

  // an infeasible fixed step
  CHECK_THROWS_AS(plan_decoherence_control({ch}, {targets}, 2.0, 0.5), std::invalid_argument);

  // realized rates hit the targets exactly for unclamped strings
  std::mt19937_64 rng(3);
  const PauliChannel wide = PauliChannel::random_error({0, 1}, 5e-3, 2e-2, rng);
  std::vector<double> want(16, 0.0);
  for (int k = 1; k < 16; ++k) want[k] = 0.05 * (1 + (k % 3));
  const MitigationPlan exact = plan_decoherence_control({wide}, {want}, 1.0);
  for (int k = 1; k < 16; ++k) {
    if (exact.channels[0].r[k] > 0.0 && exact.channels[0].r[k] < 1.0)
      CHECK(exact.channels[0].realized[k] == doctest::Approx(want[k]).epsilon(1e-10));
  }
}

TEST_CASE("insertion sampling statistics") {
  const PauliChannel ch = PauliChannel::from_error_probs({0, 1}, {{"XI", 0.02}, {"ZZ", 0.03}});
  const MitigationPlan plan = plan_from_factors({ch}, {std::vector<double>(16, 1.0)}, 0.1, 1.0);

  // r = 0 draws nothing
  const MitigationPlan idle = plan_from_factors({ch}, {std::vector<double>(16, 0.0)}, 0.1, 1.0);
  const InsertionSchedule none = sample_insertions(idle, 2, 10, 7);
  CHECK(none.sign == 1);
  CHECK(none.weight == doctest::Approx(1.0));
  for (const auto& word : none.per_layer) CHECK(word.is_identity_word());

  // frequencies follow p_k within 3 sigma
  std::map<std::string, int> counts;
  const int draws = 20000;
  for (int s = 0; s < draws; ++s) {
    const InsertionSchedule ins = sample_insertions(plan, 2, 1, 1000 + s);
    ++counts[ins.per_layer[0].label()];
  }
  const auto& quasi = plan.channels[0].quasi;
  for (const std::string label : {"II", "XI", "ZZ"}) {
    const double p = quasi.p[pauli_index_of_label(label)];
    const double got = double(counts[label]) / draws;
    const double sigma = std::sqrt(p * (1 - p) / draws);
    CHECK(std::abs(got - p) < 3.5 * sigma + 1e-12);
  }

  // weight and signs multiply across layers
  const InsertionSchedule ins = sample_insertions(plan, 2, 5, 99);
  CHECK(ins.weight == doctest::Approx(std::pow(quasi.c_mit, 5)));
  int sign = 1;
  for (int d = 0; d < 5; ++d) sign *= ins.layer_sign[d];
  CHECK(sign == ins.sign);
}

TEST_CASE("mitigated expectation estimator") {
  // degenerate: all signs +1
  std::vector<std::pair<int, double>> samples(100, {1, 0.4});
  const Estimate trivial = mitigated_expectation(samples, 1.5);
  CHECK(trivial.mean == doctest::Approx(0.6));
  CHECK(trivial.stderr == doctest::Approx(0.0));

  // synthetic +-1 signs with zero-mean values: stderr ~ c_tot / sqrt(M)
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double c_tot = 2.0;
  const int m = 4000;
  samples.clear();
  for (int s = 0; s < m; ++s) samples.push_back({unit(rng) < 0.5 ? 1 : -1, 1.0});
  const Estimate est = mitigated_expectation(samples, c_tot);
  CHECK(std::abs(est.mean) < 3.0 * c_tot / std::sqrt(double(m)));
  CHECK(est.stderr == doctest::Approx(c_tot / std::sqrt(double(m))).epsilon(0.05));

  samples.resize(1);
  CHECK_THROWS_AS(mitigated_expectation(samples, 1.0), std::invalid_argument);
}

TEST_CASE("cost formulas") {
  CHECK(total_cost(0.0, 3, 10) == doctest::Approx(1.0));
  CHECK(total_cost(0.03, 3, 10) == doctest::Approx(std::pow(1.06, 30)));
  CHECK(std::log(total_cost(0.03, 3, 20)) ==
        doctest::Approx(2.0 * std::log(total_cost(0.03, 3, 10))));

  // C_tot equals the per-layer product for uniform subgroups
  const PauliChannel ch = PauliChannel::uniform_error({0, 1}, 1e-3);
  std::vector<QuasiProbability> quasis;
  for (int g = 0; g < 3; ++g) quasis.push_back(build_quasiprobability(ch, 1.0));
  const double eps_r = ch.error_total();
  CHECK(std::pow(iteration_cost(quasis), 10) ==
        doctest::Approx(total_cost(eps_r, 3, 10)).epsilon(1e-10));

  // iteration cost: single subgroup and monotonicity in n and r
  CHECK(iteration_cost(std::span(quasis.data(), 1)) == doctest::Approx(1.0 + 2.0 * eps_r));
  std::vector<QuasiProbability> more = quasis;
  more.push_back(build_quasiprobability(ch, 1.0));
  CHECK(iteration_cost(more) > iteration_cost(quasis));
  std::vector<QuasiProbability> partial;
  for (int g = 0; g < 3; ++g) partial.push_back(build_quasiprobability(ch, 0.4));
  CHECK(iteration_cost(partial) < iteration_cost(quasis));
}

TEST_CASE("error budget") {
  CHECK(max_error_budget(1.0, 5.0, 50, 2, 1.0, 1e8) ==
        doctest::Approx(0.1 + std::log(1e8) / 10000.0));
  CHECK(max_error_budget(1.0, 5.0, 50, 2, 1.0, 1.0) == doctest::Approx(0.1));
  CHECK_THROWS_AS(max_error_budget(0.0, 1.0, 1, 1, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("cost scaling fits") {
  // exact data from the closed form: slope = g ln(1 + 2 eps_r), residual ~ 0
  const double eps_r = 0.02;
  std::vector<CostSeries> series;
  std::vector<double> n_eps;
  for (int n : {2, 3, 4}) {
    CostSeries s;
    s.label = n;
    for (int depth : {5, 10, 20, 40}) {
      s.depths.push_back(depth);
      s.c_tot.push_back(total_cost(eps_r, n - 1, depth));
    }
    series.push_back(std::move(s));
    n_eps.push_back(double(n) * eps_r);
  }
  const CostScalingFit fit = fit_cost_scaling(series, n_eps);
  for (size_t j = 0; j < series.size(); ++j) {
    const double g = series[j].label - 1;
    CHECK(fit.series[j].slope == doctest::Approx(g * std::log(1 + 2 * eps_r)).epsilon(1e-10));
    CHECK(fit.series[j].residual < 1e-10);
  }
  CHECK(fit.lambda > 0.0);

  // slope is linear in r for small eps: relative curvature < 5%
  const double eps_tot = 0.05;
  auto slope_r = [&](double r) { return std::log(1 + 2 * r * eps_tot); };
  const double curvature =
      std::abs(slope_r(1.0) - 2 * slope_r(0.5)) / slope_r(1.0);
  CHECK(curvature < 0.05);

  CHECK_THROWS_AS(fit_log_slope(std::vector<double>{1, 2}, std::vector<double>{1, 2}),
                  std::invalid_argument);
}

TEST_CASE("exhaustive insertion average equals the partially inverted map") {
  // Enumerating all insertion outcomes weighted by q_k applies the linear
  // map sum_k q_k P_k . P_k after the channel, exactly.
  std::mt19937_64 rng(21);
  const PauliChannel ch = PauliChannel::random_error({0}, 5e-3, 3e-2, rng);
  const double r = 0.6;
  const QuasiProbability quasi = build_quasiprobability(ch, r);

  const DensityMatrix initial = DensityMatrix::computational(1, 1);
  // one layer, H = 0: channel then insertion
  oracle::Cmat averaged = oracle::Cmat::Zero(2, 2);
  for (int k = 0; k < 4; ++k) {
    DensityMatrix rho = initial;
    apply_pauli_channel(rho, ch);
    if (k) apply_pauli(rho, PauliString::from_label(pauli_label_of_index(k, 1)));
    averaged += quasi.q[k] * rho.matrix();
  }

  DensityMatrix direct = initial;
  apply_pauli_channel(direct, ch);
  oracle::Cmat composed = quasi.q[0] * direct.matrix();
  for (int k = 1; k < 4; ++k) {
    DensityMatrix flipped = direct;
    apply_pauli(flipped, PauliString::from_label(pauli_label_of_index(k, 1)));
    composed += quasi.q[k] * flipped.matrix();
  }
  CHECK((averaged - composed).cwiseAbs().maxCoeff() < 1e-14);

  // The composed map reduces the error probabilities to eps(1-r) up to an
  // O(eps^2) remainder; at eps ~ 1e-6 the identification is exact to 1e-10.
  const PauliChannel tiny = PauliChannel::from_error_probs({0}, {{"Z", 2e-6}, {"X", 1e-6}});
  const QuasiProbability qt = build_quasiprobability(tiny, r);
  const char plus[] = {'+'};
  const DensityMatrix probe = DensityMatrix::product_state(plus);
  oracle::Cmat enumerated = oracle::Cmat::Zero(2, 2);
  for (int k = 0; k < 4; ++k) {
    DensityMatrix rho = probe;
    apply_pauli_channel(rho, tiny);
    if (k) apply_pauli(rho, PauliString::from_label(pauli_label_of_index(k, 1)));
    enumerated += qt.q[k] * rho.matrix();
  }
  std::vector<double> reduced(4, 0.0);
  for (int k = 1; k < 4; ++k) reduced[k] = tiny.prob(k) * (1 - r);
  reduced[0] = 1.0 - reduced[1] - reduced[2] - reduced[3];
  DensityMatrix target = probe;
  apply_pauli_channel(target, PauliChannel({0}, reduced));
  CHECK((enumerated - target.matrix()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("pec series results are independent of the worker-pool size") {
  const Hamiltonian h = molecular_chain2();
  TrotterPlan tplan;
  tplan.dt = 0.05;
  const TrotterCircuit layer = build_trotter_layer(h, tplan);
  std::mt19937_64 rng(13);
  const PauliChannel ch = PauliChannel::random_error({0, 1}, 1e-3, 4e-3, rng);
  DeviceModel model;
  model.n = 2;
  model.channels.push_back(ch);
  const MitigationPlan plan =
      plan_from_factors({ch}, {std::vector<double>(16, 0.5)}, tplan.dt, 0.5);
  const DensityMatrix initial = DensityMatrix::computational(2, 0b10);

  setenv("NOISE_FORGE_THREADS", "1", 1);
  const MitigatedSeries serial = run_pec_series(layer, model, initial, plan, 300, 55);
  setenv("NOISE_FORGE_THREADS", "5", 1);
  const MitigatedSeries pooled = run_pec_series(layer, model, initial, plan, 300, 55);
  unsetenv("NOISE_FORGE_THREADS");
  for (size_t t = 0; t < serial.mean.size(); ++t)
    for (size_t j = 0; j < serial.mean[t].size(); ++j) {
      CHECK(serial.mean[t][j] == pooled.mean[t][j]);
      CHECK(serial.stderr[t][j] == pooled.stderr[t][j]);
    }
}

TEST_CASE("pec series estimator is unbiased against the reduced channel") {
  // Monte Carlo over insertions on the emulator, compared at moderate
  // sample count with generous tolerance; the exact identity is covered by
  // the enumeration test above and the acceptance oracle.
  const Hamiltonian h = molecular_chain2();
  TrotterPlan tplan;
  tplan.dt = 0.05;
  const TrotterCircuit layer = build_trotter_layer(h, tplan);

  std::mt19937_64 rng(9);
  const PauliChannel ch = PauliChannel::random_error({0, 1}, 1e-3, 4e-3, rng);
  DeviceModel model;
  model.n = 2;
  model.channels.push_back(ch);

  const double r = 0.7;
  const MitigationPlan plan =
      plan_from_factors({ch}, {std::vector<double>(16, r)}, tplan.dt, 0.5);
  const DensityMatrix initial = DensityMatrix::computational(2, 0b10);
  const MitigatedSeries series = run_pec_series(layer, model, initial, plan, 4000, 77);

  // reduced-channel reference propagated exactly
  std::vector<double> reduced = ch.probs();
  double err = 0.0;
  for (int k = 1; k < 16; ++k) {
    reduced[k] *= (1 - r);
    err += reduced[k];
  }
  reduced[0] = 1.0 - err;
  const TimeSeries ref = trotterized_lindblad(h, {PauliChannel({0, 1}, reduced)}, {}, initial,
                                              plan.layers, plan.dt);
  for (int d = 0; d <= plan.layers; ++d) {
    const auto pops = ref.states[d].populations();
    for (int j = 0; j < 4; ++j) {
      const double tol = 5.0 * std::max(series.stderr[d][j], 1e-4);
      CHECK(std::abs(series.mean[d][j] - pops[j]) < tol);
    }
  }
}
