#pragma once

#include <cstdint>
#include <utility>

#include "eprb/geometry.hpp"
#include "eprb/models.hpp"
#include "eprb/rng.hpp"

namespace eprb {

/// Settings for one correlation measurement: which engine, which two
/// analyzer directions, how many pair trials, and the master seed.
struct ExperimentConfig {
    ModelKind model = ModelKind::BellNaive;
    UnitVector a = UnitVector::z_axis();
    UnitVector b = UnitVector::z_axis();
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;
};

struct CorrelationEstimate {
    double mean = 0.0;      // estimate of E = <value1 * value2>, in [-1/4, 1/4]
    double std_error = 0.0; // sample std dev / sqrt(trials)
    std::uint64_t trials = 0;
    ModelKind model = ModelKind::BellNaive;
    UnitVector a = UnitVector::z_axis();
    UnitVector b = UnitVector::z_axis();
};

/// One EPRB pair event. Draws the hidden variables (pairing rule
/// lambda2 = -lambda1), measures particle 1 along `a` and particle 2 along
/// `b` under the given engine, and returns both outcomes.
///
/// BellNaive: both outcomes are the local sign rule; no communication.
/// MatzkinConditioned: outcome 1 is the sign rule; particle 2's distribution
/// is re-conditioned on (a, outcome 1) before its measurement.
/// QuantumReference: outcome 1 is a fair coin; outcome 2 sampled from the
/// Born probabilities of the oppositely-aligned eigenstate. Operationally
/// this matches MatzkinConditioned; keeping it as a separate engine turns
/// that equivalence into something tests can measure rather than assume.
std::pair<SpinOutcome, SpinOutcome> run_pair_trial(ModelKind model, const UnitVector& a,
                                                   const UnitVector& b, RandomSource& rng);

/// Monte Carlo estimate of E(a, b) over config.trials independent pairs.
/// Trial i runs on derive_stream(RandomSource(config.seed), i), so the result
/// is bit-identical across platforms, thread counts, and execution orders.
/// Runs trials in parallel when built with OpenMP.
CorrelationEstimate estimate_correlation(const ExperimentConfig& config);

/// Single-threaded reference implementation with the identical contract.
/// Kept so tests can assert the parallel path changes nothing.
CorrelationEstimate estimate_correlation_serial(const ExperimentConfig& config);

struct QuadratureResult {
    double value = 0.0;
    std::uint64_t nodes_requested = 0;
    std::uint64_t grid = 0;        // actual grid is grid x grid points
    bool accuracy_warning = false; // set when nodes < 10^4 (documented
                                   // tolerances assume at least a 100x100 grid)
};

/// Deterministic sphere quadrature of the trial-level expected product,
/// independent of the Monte Carlo path. The hidden variable lambda1 is the
/// only integration variable: particle 2's expected value given lambda1 is
/// closed-form for both HV engines. Midpoint product rule on a grid uniform
/// in (cos theta, phi), polar axis aligned with `a`; `nodes` is the total
/// point budget, factored as the largest even n with n*n <= nodes.
///
/// Requires nodes >= 64 and model in {BellNaive, MatzkinConditioned};
/// QuantumReference has no lambda to integrate over.
QuadratureResult quadrature_expectation(ModelKind model, const UnitVector& a,
                                        const UnitVector& b, std::uint64_t nodes);

} // namespace eprb
