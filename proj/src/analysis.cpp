#include "eprb/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace eprb {

namespace {

constexpr double kPi = std::numbers::pi;

/// Counts +1/2 results of measure(rng) over trials, one derived stream per
/// trial; same determinism contract as estimate_correlation.
template <typename MeasureFn>
std::int64_t count_plus(std::uint64_t trials, std::uint64_t seed, MeasureFn&& measure) {
    const RandomSource root(seed);
    const auto n = static_cast<std::int64_t>(trials);
    std::int64_t plus = 0;
#pragma omp parallel for reduction(+ : plus) schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        RandomSource rng = derive_stream(root, static_cast<std::uint64_t>(i));
        if (measure(rng) == SpinOutcome::plus()) {
            ++plus;
        }
    }
    return plus;
}

/// Pooled two-proportion z statistic for equal sample sizes n. Equal
/// proportions (including both degenerate at 0 or 1) give z = 0; otherwise
/// the pooled variance is strictly positive.
double two_proportion_z(double p_i, double p_j, std::uint64_t n) {
    if (p_i == p_j) {
        return 0.0;
    }
    const double pool = 0.5 * (p_i + p_j);
    const double denom = std::sqrt(pool * (1.0 - pool) * (2.0 / static_cast<double>(n)));
    return std::abs(p_i - p_j) / denom;
}

void require_trials(std::uint64_t trials, const char* where) {
    if (trials < 1) {
        throw std::invalid_argument(std::string(where) + ": trials must be >= 1");
    }
}

} // namespace

ChshReport chsh_scan(ModelKind model, const UnitVector& a, const UnitVector& a_prime,
                     const UnitVector& b, const UnitVector& b_prime, std::uint64_t trials,
                     std::uint64_t seed) {
    const auto run = [&](const UnitVector& x, const UnitVector& y, std::uint64_t k) {
        return estimate_correlation(ExperimentConfig{model, x, y, trials, derive_seed(seed, k)});
    };
    ChshReport r;
    r.model = model;
    r.a = a;
    r.a_prime = a_prime;
    r.b = b;
    r.b_prime = b_prime;
    r.e_ab = run(a, b, 0);
    r.e_ab_prime = run(a, b_prime, 1);
    r.e_a_prime_b = run(a_prime, b, 2);
    r.e_a_prime_b_prime = run(a_prime, b_prime, 3);
    r.s_value =
        r.e_ab.mean - r.e_ab_prime.mean + r.e_a_prime_b.mean + r.e_a_prime_b_prime.mean;
    r.s_std_error = std::sqrt(r.e_ab.std_error * r.e_ab.std_error +
                              r.e_ab_prime.std_error * r.e_ab_prime.std_error +
                              r.e_a_prime_b.std_error * r.e_a_prime_b.std_error +
                              r.e_a_prime_b_prime.std_error * r.e_a_prime_b_prime.std_error);
    r.violated = std::abs(r.s_value) > r.local_bound + 3.0 * r.s_std_error;
    return r;
}

Bell1964Report bell1964_check(ModelKind model, const UnitVector& a, const UnitVector& b,
                              const UnitVector& c, std::uint64_t trials, std::uint64_t seed) {
    Bell1964Report r;
    r.model = model;
    r.a = a;
    r.b = b;
    r.c = c;
    r.e_ab = estimate_correlation(ExperimentConfig{model, a, b, trials, derive_seed(seed, 0)});
    r.e_ac = estimate_correlation(ExperimentConfig{model, a, c, trials, derive_seed(seed, 1)});
    r.e_bc = estimate_correlation(ExperimentConfig{model, b, c, trials, derive_seed(seed, 2)});
    r.lhs = std::abs(r.e_ab.mean - r.e_ac.mean);
    r.rhs = 0.25 + r.e_bc.mean;
    r.lhs_std_error = std::hypot(r.e_ab.std_error, r.e_ac.std_error);
    r.rhs_std_error = r.e_bc.std_error;
    r.violated = r.lhs > r.rhs + 3.0 * std::hypot(r.lhs_std_error, r.rhs_std_error);
    return r;
}

LocalityReport locality_audit(ModelKind model, const UnitVector& probe_lambda,
                              const UnitVector& b, const std::vector<UnitVector>& settings,
                              std::uint64_t trials_per_setting, std::uint64_t seed) {
    if (model == ModelKind::QuantumReference) {
        throw std::invalid_argument(
            "locality_audit: QuantumReference carries no hidden variable to hold fixed; "
            "use an HV model");
    }
    require_trials(trials_per_setting, "locality_audit");

    LocalityReport r;
    r.model = model;
    r.probe_lambda = probe_lambda;
    r.b = b;
    r.trials_per_setting = trials_per_setting;
    r.seed = seed;

    const UnitVector lambda2 = -probe_lambda;
    for (std::size_t k = 0; k < settings.size(); ++k) {
        const UnitVector& a = settings[k];
        const SpinOutcome o1 = naive_measure(a, probe_lambda);
        // BellNaive's particle 2 keeps the unconditioned distribution, so its
        // measurement is the plain sign rule; MatzkinConditioned re-points the
        // distribution at (a, outcome 1) first.
        const HvDistribution dist2 = model == ModelKind::BellNaive
                                         ? HvDistribution::uniform_sphere()
                                         : conditioned_distribution(a, o1);
        const std::int64_t plus =
            count_plus(trials_per_setting, derive_seed(seed, k), [&](RandomSource& rng) {
                return measure_from_distribution(dist2, b, lambda2, rng);
            });
        r.settings.push_back(LocalitySettingResult{
            a, o1.sign(),
            static_cast<double>(plus) / static_cast<double>(trials_per_setting)});
    }

    for (std::size_t i = 0; i < r.settings.size(); ++i) {
        for (std::size_t j = i + 1; j < r.settings.size(); ++j) {
            const double pi_ = r.settings[i].p_plus;
            const double pj = r.settings[j].p_plus;
            r.max_divergence = std::max(r.max_divergence, std::abs(pi_ - pj));
            r.max_z = std::max(r.max_z, two_proportion_z(pi_, pj, trials_per_setting));
        }
    }
    r.depends_on_remote = r.max_z > 5.0;
    return r;
}

NoSignalingReport no_signaling_check(ModelKind model, const UnitVector& b,
                                     const std::vector<UnitVector>& settings,
                                     std::uint64_t trials_per_setting, std::uint64_t seed) {
    require_trials(trials_per_setting, "no_signaling_check");

    NoSignalingReport r;
    r.model = model;
    r.b = b;
    r.trials_per_setting = trials_per_setting;
    r.seed = seed;
    r.sigma_null = 0.5 / std::sqrt(static_cast<double>(trials_per_setting));

    for (std::size_t k = 0; k < settings.size(); ++k) {
        const UnitVector& a = settings[k];
        const std::int64_t plus =
            count_plus(trials_per_setting, derive_seed(seed, k), [&](RandomSource& rng) {
                return run_pair_trial(model, a, b, rng).second;
            });
        r.settings.push_back(NoSignalingSettingResult{
            a, static_cast<double>(plus) / static_cast<double>(trials_per_setting)});
    }

    for (std::size_t i = 0; i < r.settings.size(); ++i) {
        r.max_deviation_from_half =
            std::max(r.max_deviation_from_half, std::abs(r.settings[i].marginal_plus - 0.5));
        for (std::size_t j = i + 1; j < r.settings.size(); ++j) {
            r.max_divergence =
                std::max(r.max_divergence,
                         std::abs(r.settings[i].marginal_plus - r.settings[j].marginal_plus));
        }
    }
    r.all_within_3sigma = r.max_deviation_from_half <= 3.0 * r.sigma_null;
    return r;
}

RingConsistencyReport ring_consistency_check(const UnitVector& state_axis, int state_sign,
                                             const UnitVector& meas_axis, std::uint64_t trials,
                                             std::uint64_t seed) {
    if (state_sign != 1 && state_sign != -1) {
        throw std::invalid_argument("ring_consistency_check: state_sign must be +1 or -1");
    }
    require_trials(trials, "ring_consistency_check");

    const std::int64_t plus = count_plus(trials, seed, [&](RandomSource& rng) {
        return naive_measure(meas_axis, sample_ring(state_axis, state_sign, rng));
    });

    RingConsistencyReport r;
    r.state_axis = state_axis;
    r.state_sign = state_sign;
    r.meas_axis = meas_axis;
    r.trials = trials;
    r.seed = seed;
    r.sign_rule_plus = static_cast<double>(plus) / static_cast<double>(trials);
    r.born_plus = born_probability(state_axis, state_sign, meas_axis, SpinOutcome::plus());
    r.gap = std::abs(r.sign_rule_plus - r.born_plus);
    r.std_error =
        std::sqrt(r.sign_rule_plus * (1.0 - r.sign_rule_plus) / static_cast<double>(trials));
    return r;
}

std::vector<AngleSweepRow> angle_sweep(ModelKind model, const std::vector<double>& theta_grid,
                                       std::uint64_t trials, std::uint64_t seed) {
    require_trials(trials, "angle_sweep");
    std::vector<AngleSweepRow> rows;
    rows.reserve(theta_grid.size());
    for (std::size_t i = 0; i < theta_grid.size(); ++i) {
        const double theta = theta_grid[i];
        if (!(theta >= 0.0 && theta <= kPi)) {
            throw std::domain_error("angle_sweep: theta must lie in [0, pi]");
        }
        const UnitVector a = UnitVector::z_axis();
        const UnitVector b = axis_in_xz_plane(theta);
        const CorrelationEstimate est =
            estimate_correlation(ExperimentConfig{model, a, b, trials, derive_seed(seed, i)});
        double analytic_model = 0.0;
        switch (model) {
        case ModelKind::BellNaive:
            analytic_model = naive_pair_expectation_analytic(theta);
            break;
        case ModelKind::MatzkinConditioned:
            analytic_model = matzkin_pair_expectation_analytic(a, b);
            break;
        case ModelKind::QuantumReference:
            analytic_model = qm_pair_expectation(a, b);
            break;
        }
        rows.push_back(AngleSweepRow{theta, est.mean, est.std_error, analytic_model,
                                     qm_pair_expectation(a, b)});
    }
    return rows;
}

} // namespace eprb
