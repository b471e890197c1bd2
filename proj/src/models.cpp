#include "eprb/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace eprb {

namespace {
constexpr double kPi = std::numbers::pi;
} // namespace

std::string_view to_string(ModelKind model) {
    switch (model) {
    case ModelKind::QuantumReference: return "qm";
    case ModelKind::BellNaive: return "bell-naive";
    case ModelKind::MatzkinConditioned: return "matzkin";
    }
    throw std::invalid_argument("to_string: unknown ModelKind");
}

std::optional<ModelKind> model_from_string(std::string_view name) {
    if (name == "qm") return ModelKind::QuantumReference;
    if (name == "bell-naive") return ModelKind::BellNaive;
    if (name == "matzkin") return ModelKind::MatzkinConditioned;
    return std::nullopt;
}

HvDistribution HvDistribution::uniform_sphere() {
    return HvDistribution{Kind::UniformSphere, UnitVector::z_axis(), +1};
}

HvDistribution HvDistribution::half_sphere(const UnitVector& axis, int sign) {
    if (sign != 1 && sign != -1) {
        throw std::invalid_argument("HvDistribution::half_sphere: sign must be +1 or -1");
    }
    return HvDistribution{Kind::HalfSphere, axis, sign};
}

HvDistribution HvDistribution::eigen_ring(const UnitVector& axis, int sign) {
    if (sign != 1 && sign != -1) {
        throw std::invalid_argument("HvDistribution::eigen_ring: sign must be +1 or -1");
    }
    return HvDistribution{Kind::EigenRing, axis, sign};
}

bool HvDistribution::contains(const UnitVector& lambda, double tol) const {
    switch (kind) {
    case Kind::UniformSphere:
        return true;
    case Kind::HalfSphere:
        return sign * lambda.dot(axis) >= -tol;
    case Kind::EigenRing:
        return std::abs(lambda.dot(axis) - 0.5 * sign) <= tol;
    }
    throw std::logic_error("HvDistribution::contains: unknown kind");
}

double qm_pair_expectation(const UnitVector& a, const UnitVector& b) {
    return -0.25 * a.dot(b);
}

double born_probability(const UnitVector& state_axis, int state_sign,
                        const UnitVector& meas_axis, SpinOutcome outcome) {
    if (state_sign != 1 && state_sign != -1) {
        throw std::invalid_argument("born_probability: state_sign must be +1 or -1");
    }
    // cos^2(theta/2) for the aligned outcome, written as (1 + cos theta)/2 so
    // that the two outcome probabilities are exact complements.
    const double dot = std::clamp(state_axis.dot(meas_axis), -1.0, 1.0);
    const double p_plus = 0.5 * (1.0 + state_sign * dot);
    return outcome == SpinOutcome::plus() ? p_plus : 1.0 - p_plus;
}

SpinOutcome measure_from_distribution(const HvDistribution& dist, const UnitVector& u,
                                      const UnitVector& lambda, RandomSource& rng) {
    if (dist.kind == HvDistribution::Kind::UniformSphere) {
        return naive_measure(u, lambda);
    }
    if (!dist.contains(lambda)) {
        throw SupportViolationError("measure_from_distribution: hidden variable outside "
                                    "distribution support");
    }
    const double p_plus = born_probability(dist.axis, dist.sign, u, SpinOutcome::plus());
    return rng.next_double() < p_plus ? SpinOutcome::plus() : SpinOutcome::minus();
}

double naive_pair_expectation_analytic(double theta) {
    if (!(theta >= 0.0 && theta <= kPi)) {
        throw std::domain_error("naive_pair_expectation_analytic: theta must lie in [0, pi]");
    }
    return -0.25 + theta / (2.0 * kPi);
}

double matzkin_pair_expectation_analytic(const UnitVector& a, const UnitVector& b) {
    return qm_pair_expectation(a, b);
}

HvDistribution conditioned_distribution(const UnitVector& a, SpinOutcome outcome1) {
    return HvDistribution::half_sphere(a, -outcome1.sign());
}

} // namespace eprb
