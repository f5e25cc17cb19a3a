#pragma once

#include <vector>

#include "noiseforge/channels.hpp"
#include "noiseforge/density.hpp"
#include "noiseforge/hamiltonian.hpp"
#include "noiseforge/trotter.hpp"

namespace noiseforge {

struct LindbladRun {
  Hamiltonian hamiltonian;
  LindbladSpec dissipators;
  DensityMatrix initial;
  double total_time = 0.0;
  double dt = 0.0;        // integrator step
  int output_stride = 1;  // emit every stride-th step
};

struct TimeSeries {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
};

// Classic fourth-order Runge-Kutta on d rho/dt = -i[H, rho] + dissipators,
// with symmetrization after every step.  Aborts when the trace drifts by
// more than 1e-6.
TimeSeries rk4_propagate(const LindbladRun& run);

// Same run, but the step is halved until two consecutive refinements agree
// to `tol` in every population; throws after max_halvings.
TimeSeries rk4_propagate_verified(const LindbladRun& run, double tol = 1e-8,
                                  int max_halvings = 6);

// Deterministic twin of the emulator's exact mode: alternate the dense layer
// unitary with exact channel and reset-slot application, D times.
TimeSeries trotterized_lindblad(const Hamiltonian& h,
                                const std::vector<PauliChannel>& channels,
                                const std::vector<ResetSpec>& resets,
                                const DensityMatrix& initial, int layers, double dt,
                                int order = 1);

// Mean absolute population difference per time point:
// eta(t) = 2^-n sum_i |<i| rho_q - rho_c |i>|.
std::vector<double> eta_metric(const TimeSeries& quantum, const TimeSeries& classical);
std::vector<double> eta_metric(const std::vector<std::vector<double>>& populations_q,
                               const TimeSeries& classical);

}  // namespace noiseforge
