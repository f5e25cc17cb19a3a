#pragma once

#include <string>
#include <vector>

#include "noiseforge/config.hpp"
#include "noiseforge/lindblad.hpp"
#include "noiseforge/pec.hpp"

namespace noiseforge {

struct PipelineResult {
  std::vector<std::string> artifacts;
};

// Executes the configured mode and writes its artifacts under out_dir.
PipelineResult run_pipeline(const ExperimentConfig& cfg, const std::string& out_dir,
                            bool svg = true);

// Monte Carlo PEC estimate of the population time series.  Every sample
// draws fresh insertions and applies the cumulative sign and weight of the
// layers up to each time point.
//
// Plain: mean of weight * (traceless part of the populations); the identity
// component of a projector is carried exactly.  ControlVariate additionally
// subtracts the unmitigated baseline trajectory, exploiting E[weight] = 1;
// it is unbiased with the same budget and removes the sign noise on
// populations the insertions cannot move.
enum class PecEstimator { Plain, ControlVariate };

struct MitigatedSeries {
  std::vector<double> times;
  std::vector<std::vector<double>> mean;    // [time][basis state]
  std::vector<std::vector<double>> stderr;  // same shape
  long samples = 0;
};

MitigatedSeries run_pec_series(const TrotterCircuit& layer, const DeviceModel& model,
                               const DensityMatrix& initial, const MitigationPlan& plan,
                               long samples, uint64_t seed,
                               PecEstimator estimator = PecEstimator::ControlVariate);

// Reference Lindblad rates realized by a plan (plus reset slots, if any).
LindbladSpec plan_reference_dissipator(const MitigationPlan& plan, int n,
                                       const std::vector<GateOp>& reset_slots,
                                       double reset_error);

std::string population_label(int n, int64_t basis_index);

}  // namespace noiseforge
