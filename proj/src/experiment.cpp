#include "eprb/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace eprb {

namespace {

constexpr double kPi = std::numbers::pi;

void check_config(const ExperimentConfig& config) {
    if (config.trials < 1) {
        throw std::invalid_argument("estimate_correlation: trials must be >= 1");
    }
}

// Shared by the serial and parallel paths: product of outcome signs for one
// trial. Tallying signs (+-1) instead of values keeps the accumulator integer,
// so aggregation is exact and order-insensitive with no compensated summation.
std::int64_t trial_sign_product(ModelKind model, const UnitVector& a, const UnitVector& b,
                                RandomSource rng) {
    const auto [o1, o2] = run_pair_trial(model, a, b, rng);
    return static_cast<std::int64_t>(o1.sign()) * o2.sign();
}

CorrelationEstimate finish_estimate(const ExperimentConfig& config, std::int64_t sign_sum) {
    const auto n = static_cast<double>(config.trials);
    // Products are +-1/4, so mean = sum/(4n) and the sample variance reduces
    // to (1/16 - mean^2) * n/(n-1). mean is exact enough that the difference
    // cannot go negative: |sum/n| <= 1 implies mean^2 <= 1/16.
    const double mean = 0.25 * (static_cast<double>(sign_sum) / n);
    double std_error = 0.0;
    if (config.trials > 1) {
        const double sample_var = (0.0625 - mean * mean) * (n / (n - 1.0));
        std_error = std::sqrt(std::max(sample_var, 0.0) / n);
    }
    return CorrelationEstimate{mean, std_error, config.trials, config.model, config.a, config.b};
}

} // namespace

std::pair<SpinOutcome, SpinOutcome> run_pair_trial(ModelKind model, const UnitVector& a,
                                                   const UnitVector& b, RandomSource& rng) {
    switch (model) {
    case ModelKind::QuantumReference: {
        const SpinOutcome o1 =
            (rng.next_u64() & 1u) ? SpinOutcome::plus() : SpinOutcome::minus();
        const double p_plus = born_probability(a, -o1.sign(), b, SpinOutcome::plus());
        const SpinOutcome o2 =
            rng.next_double() < p_plus ? SpinOutcome::plus() : SpinOutcome::minus();
        return {o1, o2};
    }
    case ModelKind::BellNaive: {
        const UnitVector lambda1 = sample_uniform_sphere(rng);
        const UnitVector lambda2 = -lambda1;
        return {naive_measure(a, lambda1), naive_measure(b, lambda2)};
    }
    case ModelKind::MatzkinConditioned: {
        const UnitVector lambda1 = sample_uniform_sphere(rng);
        const UnitVector lambda2 = -lambda1;
        const SpinOutcome o1 = naive_measure(a, lambda1);
        // lambda2 . a = -(lambda1 . a) has the opposite sign of outcome 1
        // (or is 0), so lambda2 always lies in the conditioned half sphere;
        // measure_from_distribution throws if that pairing invariant breaks.
        const HvDistribution dist2 = conditioned_distribution(a, o1);
        const SpinOutcome o2 = measure_from_distribution(dist2, b, lambda2, rng);
        return {o1, o2};
    }
    }
    throw std::invalid_argument("run_pair_trial: unknown ModelKind");
}

CorrelationEstimate estimate_correlation(const ExperimentConfig& config) {
    check_config(config);
    const RandomSource root(config.seed);
    const auto n = static_cast<std::int64_t>(config.trials);
    std::int64_t sign_sum = 0;
#pragma omp parallel for reduction(+ : sign_sum) schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        sign_sum += trial_sign_product(config.model, config.a, config.b,
                                       derive_stream(root, static_cast<std::uint64_t>(i)));
    }
    return finish_estimate(config, sign_sum);
}

CorrelationEstimate estimate_correlation_serial(const ExperimentConfig& config) {
    check_config(config);
    const RandomSource root(config.seed);
    std::int64_t sign_sum = 0;
    for (std::uint64_t i = 0; i < config.trials; ++i) {
        sign_sum += trial_sign_product(config.model, config.a, config.b, derive_stream(root, i));
    }
    return finish_estimate(config, sign_sum);
}

QuadratureResult quadrature_expectation(ModelKind model, const UnitVector& a,
                                        const UnitVector& b, std::uint64_t nodes) {
    if (model == ModelKind::QuantumReference) {
        throw std::invalid_argument(
            "quadrature_expectation: QuantumReference has no hidden variable to integrate; "
            "use an HV model");
    }
    if (nodes < 64) {
        throw std::invalid_argument("quadrature_expectation: nodes must be >= 64");
    }

    // Largest even n with n*n <= nodes. Even keeps cos = 0 on a cell boundary,
    // so no midpoint lands on the a-orthogonal great circle where the sign
    // rule ties.
    auto grid = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(nodes)));
    while (grid * grid > nodes) --grid;
    grid -= grid % 2;

    const auto [e1, e2] = orthonormal_basis(a);
    const auto n = static_cast<std::int64_t>(grid);
    double sum = 0.0;
#pragma omp parallel for reduction(+ : sum) schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const double c = -1.0 + (static_cast<double>(i) + 0.5) * (2.0 / static_cast<double>(n));
        const double s = std::sqrt(std::max(1.0 - c * c, 0.0));
        double row = 0.0;
        for (std::int64_t j = 0; j < n; ++j) {
            const double phi =
                (static_cast<double>(j) + 0.5) * (2.0 * kPi / static_cast<double>(n));
            const UnitVector lambda(c * a.x() + s * (std::cos(phi) * e1.x() + std::sin(phi) * e2.x()),
                                    c * a.y() + s * (std::cos(phi) * e1.y() + std::sin(phi) * e2.y()),
                                    c * a.z() + s * (std::cos(phi) * e1.z() + std::sin(phi) * e2.z()));
            const SpinOutcome o1 = naive_measure(a, lambda);
            if (model == ModelKind::BellNaive) {
                row += o1.value() * naive_measure(b, -lambda).value();
            } else {
                // Expected value of outcome 2 under the conditioned Born
                // probabilities: p(+1/2) - 1/2.
                const double p_plus =
                    born_probability(a, -o1.sign(), b, SpinOutcome::plus());
                row += o1.value() * (p_plus - 0.5);
            }
        }
        sum += row;
    }

    QuadratureResult result;
    result.value = sum / (static_cast<double>(grid) * static_cast<double>(grid));
    result.nodes_requested = nodes;
    result.grid = grid;
    result.accuracy_warning = grid < 100;
    return result;
}

} // namespace eprb
