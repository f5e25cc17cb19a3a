#include <doctest.h>

#include <cmath>

#include "noiseforge/hamiltonian.hpp"
#include "noiseforge/trotter.hpp"
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

// Product of per-term exponentials, the formula the layer must reproduce.
oracle::Cmat product_formula(const Hamiltonian& h, double dt, int order) {
  const int64_t dim = int64_t{1} << h.n;
  oracle::Cmat u = oracle::Cmat::Identity(dim, dim);
  const std::complex<double> mi(0, -1);
  if (order == 1) {
    for (const auto& t : h.terms)
      u = oracle::expm(mi * t.coeff * dt * oracle::pauli_word(t.word.label())) * u;
    return u;
  }
  for (const auto& t : h.terms)
    u = oracle::expm(mi * t.coeff * (dt / 2) * oracle::pauli_word(t.word.label())) * u;
  for (auto it = h.terms.rbegin(); it != h.terms.rend(); ++it)
    u = oracle::expm(mi * it->coeff * (dt / 2) * oracle::pauli_word(it->word.label())) * u;
  return u;
}

double spectral_distance(const oracle::Cmat& a, const oracle::Cmat& b) {
  return (a - b).jacobiSvd().singularValues()(0);
}

}  // namespace

TEST_CASE("chain hamiltonian terms") {
  const Hamiltonian h = molecular_chain2();
  REQUIRE(h.terms.size() == 4);
  CHECK(h.terms[0].coeff == doctest::Approx(-60.75));
  CHECK(h.terms[0].word.label() == "ZI");
  CHECK(h.terms[1].coeff == doctest::Approx(-60.5));
  CHECK(h.terms[1].word.label() == "IZ");
  CHECK(h.terms[2].coeff == doctest::Approx(0.25));
  CHECK(h.terms[2].word.label() == "XX");
  CHECK(h.terms[3].coeff == doctest::Approx(0.25));
  CHECK(h.terms[3].word.label() == "YY");

  ChainParams zero;
  zero.n = 2;
  zero.site_energies = {0, 0};
  zero.couplings = {0};
  for (const auto& t : build_chain_hamiltonian(zero).terms) CHECK(t.coeff == 0.0);

  ChainParams three;
  three.n = 3;
  three.site_energies = {1, 1, 1};
  three.couplings = {2, 2};
  const Hamiltonian h3 = build_chain_hamiltonian(three);
  REQUIRE(h3.terms.size() == 7);
  for (int m = 0; m < 3; ++m) CHECK(h3.terms[m].coeff == doctest::Approx(-0.5));
  for (int b = 3; b < 7; ++b) CHECK(h3.terms[b].coeff == doctest::Approx(1.0));

  ChainParams bad = three;
  bad.couplings = {2};
  CHECK_THROWS_AS(build_chain_hamiltonian(bad), std::invalid_argument);
}

TEST_CASE("tfim hamiltonian terms") {
  const Hamiltonian h = build_tfim_hamiltonian(2, 0.5236, 1.0);
  REQUIRE(h.terms.size() == 3);
  CHECK(h.terms[0].coeff == doctest::Approx(-0.5236));
  CHECK(h.terms[0].word.label() == "ZZ");
  CHECK(h.terms[1].word.label() == "XI");
  CHECK(h.terms[2].word.label() == "IX");
  CHECK(h.terms[1].coeff == doctest::Approx(1.0));

  const Hamiltonian h3 = build_tfim_hamiltonian(3, 1.0, 2.0);
  REQUIRE(h3.terms.size() == 5);
  CHECK(h3.terms[0].coeff == doctest::Approx(-1.0));
  CHECK(h3.terms[1].coeff == doctest::Approx(-1.0));
  for (int m = 2; m < 5; ++m) CHECK(h3.terms[m].coeff == doctest::Approx(2.0));

  for (const auto& t : build_tfim_hamiltonian(3, 0.0, 0.0).terms) CHECK(t.coeff == 0.0);
}

TEST_CASE("layer reproduces the product formula") {
  const Hamiltonian h = molecular_chain2();
  for (int order : {1, 2}) {
    TrotterPlan plan;
    plan.order = order;
    plan.dt = 0.013;
    const TrotterCircuit layer = build_trotter_layer(h, plan);
    const oracle::Cmat u = circuit_unitary(layer);
    CHECK(spectral_distance(u, product_formula(h, plan.dt, order)) < 1e-10);
  }
}

TEST_CASE("layer structure: chain gate pattern and cnot counts") {
  TrotterPlan plan;
  plan.dt = 0.02;
  const TrotterCircuit layer = build_trotter_layer(molecular_chain2(), plan);
  // Fig.-style order: two Z rotations, then the XX block, then the YY block.
  CHECK(layer.gates[0].kind == GateKind::RotZ);
  CHECK(layer.gates[0].q0 == 0);
  CHECK(layer.gates[0].angle == doctest::Approx(2 * -60.75 * plan.dt));
  CHECK(layer.gates[1].kind == GateKind::RotZ);
  CHECK(layer.gates[1].q0 == 1);
  CHECK(layer.cnot_count() == 4);
  CHECK(layer.cnot_layers.size() == 4);

  // exactly 2 CNOTs per two-qubit exponential, also at order 2
  TrotterPlan plan2 = plan;
  plan2.order = 2;
  CHECK(build_trotter_layer(molecular_chain2(), plan2).cnot_count() == 8);

  // TFIM layer carries ZZ blocks and X rotations built from H Rz H
  const TrotterCircuit tfim =
      build_trotter_layer(build_tfim_hamiltonian(2, 0.5, 1.0), plan);
  CHECK(tfim.cnot_count() == 2);
  for (const auto& g : tfim.gates)
    CHECK((g.kind == GateKind::RotZ || g.kind == GateKind::Hadamard ||
           g.kind == GateKind::Cnot));
}

TEST_CASE("zero time-step layer is the identity") {
  TrotterPlan plan;
  plan.dt = 1e-300;  // positive but negligible
  const TrotterCircuit layer = build_trotter_layer(molecular_chain2(), plan);
  TrotterCircuit zeroed = layer;
  for (auto& g : zeroed.gates)
    if (g.kind == GateKind::RotZ) g.angle = 0.0;
  const oracle::Cmat u = circuit_unitary(zeroed);
  CHECK((u - oracle::Cmat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("single-layer error is bounded by the commutator norm") {
  // n=2 chain, k=1, dt=0.01: || U_layer - expm(-i H dt) || < alpha_comm dt^2
  const Hamiltonian h = molecular_chain2();
  TrotterPlan plan;
  plan.dt = 0.01;
  const oracle::Cmat u = circuit_unitary(build_trotter_layer(h, plan));
  const oracle::Cmat exact = oracle::expm(std::complex<double>(0, -plan.dt) * h.dense());
  const double alpha = commutator_norm(h, 1);
  CHECK(spectral_distance(u, exact) < alpha * plan.dt * plan.dt);
}

TEST_CASE("trotter error scales as 1/D (order 1) and 1/D^2 (order 2)") {
  ChainParams p;
  p.n = 2;
  p.site_energies = {1.0, 2.0};
  p.couplings = {0.7};
  const Hamiltonian h = build_chain_hamiltonian(p);
  const double t = 1.0;
  const oracle::Cmat exact = oracle::expm(std::complex<double>(0, -t) * h.dense());

  for (int order : {1, 2}) {
    std::vector<double> logd, logerr;
    for (int depth : {8, 16, 32, 64}) {
      TrotterPlan plan;
      plan.order = order;
      plan.dt = t / depth;
      const oracle::Cmat u = circuit_unitary(build_trotter_layer(h, plan));
      oracle::Cmat total = oracle::Cmat::Identity(4, 4);
      for (int d = 0; d < depth; ++d) total = u * total;
      logd.push_back(std::log(double(depth)));
      logerr.push_back(std::log(spectral_distance(total, exact)));
    }
    // least-squares slope of log err vs log D
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t j = 0; j < logd.size(); ++j) {
      sx += logd[j];
      sy += logerr[j];
      sxx += logd[j] * logd[j];
      sxy += logd[j] * logerr[j];
    }
    const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
    if (order == 1) {
      CHECK(slope < -0.8);
      CHECK(slope > -1.2);
    } else {
      CHECK(slope < -1.8);
    }
  }
}

TEST_CASE("depth estimates") {
  CHECK(depth_estimate(1, 1, 1, 1) == 1);
  CHECK(depth_estimate(4, 2, 0.1, 1) == 160);
  CHECK(depth_estimate(4, 2, 0.1, 2) == 18);
  CHECK_THROWS_AS(depth_estimate(0, 1, 1, 1), std::invalid_argument);

  CHECK(chain_depth_estimate(1, 1, 1, 0, 1, 1) == 1);
  CHECK(chain_depth_estimate(2, 1, 0.5, 121.5, 1, 0.1) == 1220);
  // doubling the tolerance halves the depth (up to the ceiling)
  const int d1 = chain_depth_estimate(3, 1, 0.5, 10, 2, 0.05);
  const int d2 = chain_depth_estimate(3, 1, 0.5, 10, 2, 0.10);
  CHECK(std::abs(d1 - 2 * d2) <= 1);
  CHECK_THROWS_AS(chain_depth_estimate(2, 3, 0.5, 1, 1, 0.1), std::invalid_argument);
}

TEST_CASE("commutator norm") {
  // all-Z chain commutes
  ChainParams p;
  p.n = 2;
  p.site_energies = {1.0, 2.0};
  p.couplings = {0.0};
  CHECK(commutator_norm(build_chain_hamiltonian(p), 1) == doctest::Approx(0.0));

  // H = X + Z on one qubit: ||[Z,X]|| + ||[X,Z]|| = 4
  Hamiltonian h;
  h.n = 1;
  h.terms.push_back({1.0, PauliString::from_label("X")});
  h.terms.push_back({1.0, PauliString::from_label("Z")});
  CHECK(commutator_norm(h, 1) == doctest::Approx(4.0));

  // a realistic chain value is positive, finite, and usable by depth_estimate
  const double alpha = commutator_norm(molecular_chain2(), 1);
  CHECK(alpha > 0.0);
  CHECK(std::isfinite(alpha));
  CHECK(depth_estimate(alpha, 1.0, 0.1, 1) >= 1);
}

TEST_CASE("layer rejects unsupported terms") {
  Hamiltonian h;
  h.n = 3;
  std::string far(3, 'I');
  far[0] = far[2] = 'X';
  h.terms.push_back({1.0, PauliString::from_label(far)});
  TrotterPlan plan;
  plan.dt = 0.1;
  CHECK_THROWS_AS(build_trotter_layer(h, plan), std::invalid_argument);

  Hamiltonian wide;
  wide.n = 3;
  wide.terms.push_back({1.0, PauliString::from_label("XXX")});
  CHECK_THROWS_AS(build_trotter_layer(wide, plan), std::invalid_argument);

  TrotterPlan bad;
  bad.order = 3;
  bad.dt = 0.1;
  CHECK_THROWS_AS(build_trotter_layer(molecular_chain2(), bad), std::invalid_argument);
}

TEST_CASE("ancilla damping block realizes amplitude damping on the system") {
  const double theta = 2.0 * std::asin(std::sqrt(0.36));  // w = 0.36
  TrotterCircuit block;
  block.n = 2;
  block.dt = 1.0;
  block.gates = ancilla_damping_block(2, 0, 1, theta);
  const oracle::Cmat u = circuit_unitary(block);

  // |1>|0> -> damping of the system qubit after tracing the ancilla
  DensityMatrix rho = DensityMatrix::computational(2, 0b10);
  apply_unitary(rho, u);
  const std::vector<int> keep = {0};
  const DensityMatrix sys = rho.partial_trace(keep);
  CHECK(sys.matrix()(0, 0).real() == doctest::Approx(0.36));
  CHECK(sys.matrix()(1, 1).real() == doctest::Approx(0.64));
}
