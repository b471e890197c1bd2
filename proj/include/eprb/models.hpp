#pragma once

#include <optional>
#include <stdexcept>
#include <string_view>

#include "eprb/geometry.hpp"
#include "eprb/rng.hpp"

namespace eprb {

/// Two-valued spin result. Stored as a sign so tallies stay integer-exact;
/// the physical component is sign/2.
class SpinOutcome {
public:
    static SpinOutcome plus() { return SpinOutcome(+1); }
    static SpinOutcome minus() { return SpinOutcome(-1); }
    static SpinOutcome from_sign(int sign) {
        if (sign != 1 && sign != -1) {
            throw std::invalid_argument("SpinOutcome: sign must be +1 or -1");
        }
        return SpinOutcome(sign);
    }

    int sign() const { return sign_; }
    double value() const { return 0.5 * sign_; }

    SpinOutcome operator-() const { return SpinOutcome(-sign_); }

    friend bool operator==(SpinOutcome, SpinOutcome) = default;

private:
    explicit SpinOutcome(int sign) : sign_(sign) {}
    int sign_;
};

/// Which prediction engine answers for an experiment.
enum class ModelKind {
    QuantumReference,
    BellNaive,
    MatzkinConditioned,
};

std::string_view to_string(ModelKind model);
std::optional<ModelKind> model_from_string(std::string_view name);

/// Family of hidden-variable distributions a particle can carry:
///   UniformSphere       uniform over the whole unit sphere
///   HalfSphere(a, s)    uniform over {lambda : s * (lambda . a) >= 0},
///                       boundary included
///   EigenRing(a, s)     supported on the circle {lambda : lambda . a = s/2}
struct HvDistribution {
    enum class Kind { UniformSphere, HalfSphere, EigenRing };

    Kind kind;
    UnitVector axis; // unused for UniformSphere
    int sign;        // +1 or -1; unused for UniformSphere

    static HvDistribution uniform_sphere();
    static HvDistribution half_sphere(const UnitVector& axis, int sign);
    static HvDistribution eigen_ring(const UnitVector& axis, int sign);

    /// Whether `lambda` lies in the support, within `tol` on the constraint.
    bool contains(const UnitVector& lambda, double tol = 1e-9) const;

    friend bool operator==(const HvDistribution&, const HvDistribution&) = default;
};

/// A measurement was asked to act on a hidden variable outside the support of
/// the distribution it was paired with. Always a caller bug, never data.
class SupportViolationError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Singlet-state expectation of the product of the two spin components
/// measured along `a` and `b`: -(a . b)/4.
double qm_pair_expectation(const UnitVector& a, const UnitVector& b);

/// Probability of `outcome` when a particle in the spin eigenstate
/// (state_axis, state_sign/2) is measured along `meas_axis`.
/// The two outcome probabilities sum to 1 exactly: the +1/2 probability is
/// computed, the -1/2 probability is its complement.
double born_probability(const UnitVector& state_axis, int state_sign,
                        const UnitVector& meas_axis, SpinOutcome outcome);

/// Sign rule for a particle drawn from the uniform sphere distribution:
/// the outcome is the sign of u . lambda. The measure-zero tie
/// u . lambda = 0 resolves to +1/2 so the rule stays a pure function.
inline SpinOutcome naive_measure(const UnitVector& u, const UnitVector& lambda) {
    return u.dot(lambda) >= 0.0 ? SpinOutcome::plus() : SpinOutcome::minus();
}

/// Measurement along `u` of a particle with hidden variable `lambda` drawn
/// from `dist`.
///
/// UniformSphere delegates to the deterministic sign rule and never touches
/// `rng`. HalfSphere and EigenRing treat the particle as if it were in the
/// spin eigenstate (dist.axis, dist.sign/2) and sample the outcome from the
/// corresponding Born probabilities; in those branches `lambda` is only
/// support-checked, never used to pick the outcome. That asymmetry is the
/// defining feature of this model family: the distribution itself carries
/// information the hidden variable does not.
SpinOutcome measure_from_distribution(const HvDistribution& dist, const UnitVector& u,
                                      const UnitVector& lambda, RandomSource& rng);

/// Closed form for the naive-model pair expectation at relative angle
/// `theta` in [0, pi]: -1/4 + theta/(2 pi).
double naive_pair_expectation_analytic(double theta);

/// Closed form for the conditioned-model pair expectation: -(a . b)/4,
/// coinciding with qm_pair_expectation.
double matzkin_pair_expectation_analytic(const UnitVector& a, const UnitVector& b);

/// Distribution assigned to particle 2 once particle 1 has been measured
/// along `a` with result `outcome1`: the half sphere opposite to the
/// outcome, HalfSphere(a, -outcome1.sign).
HvDistribution conditioned_distribution(const UnitVector& a, SpinOutcome outcome1);

} // namespace eprb
