#include "collapse/analytic.hpp"

#include <cmath>
#include <string>

#include "collapse/errors.hpp"

namespace collapse::analytic {

namespace {

void require_nonnegative(Energy e) {
    if (!std::isfinite(e.mev) || e.mev < 0.0)
        throw ValidationError("energy difference must be finite and >= 0, got " + std::to_string(e.mev));
}

void require_nonnegative(Duration t) {
    if (!std::isfinite(t.seconds) || t.seconds < 0.0)
        throw ValidationError("time must be finite and >= 0, got " + std::to_string(t.seconds));
}

DensityMatrix two_level_matrix(const TwoLevelSpec& spec, double factor) {
    const double coherence = factor * std::sqrt(spec.alpha0() * spec.beta0());
    return DensityMatrix::unchecked(2, {Complex(spec.alpha0()), Complex(coherence), Complex(coherence),
                                        Complex(spec.beta0())});
}

}  // namespace

TwoLevelSpec TwoLevelSpec::make(double alpha0, double beta0, Energy delta_e, PhysicalConstants constants) {
    if (!(alpha0 >= 0.0 && alpha0 <= 1.0) || !(beta0 >= 0.0 && beta0 <= 1.0))
        throw ValidationError("two-level spec: populations must lie in [0, 1]");
    if (std::fabs(alpha0 + beta0 - 1.0) > 1e-12)
        throw ValidationError("two-level spec: alpha0 + beta0 must equal 1");
    require_nonnegative(delta_e);
    return TwoLevelSpec(alpha0, beta0, delta_e, constants);
}

CollapsePrediction collapse_time(Energy delta_e, const PhysicalConstants& constants) {
    require_nonnegative(delta_e);
    CollapsePrediction p{std::nullopt, delta_e, constants.k()};
    if (delta_e.mev > 0.0)
        p.collapse_time = Duration{constants.k() * constants.hbar_times_planck_energy() / (delta_e.mev * delta_e.mev)};
    return p;
}

double decoherence_exponent(Energy delta_e, Duration t, const PhysicalConstants& constants) {
    require_nonnegative(delta_e);
    require_nonnegative(t);
    return delta_e.mev * delta_e.mev * t.seconds / (constants.k() * constants.hbar_times_planck_energy());
}

double decoherence_factor(Energy delta_e, Duration t, const PhysicalConstants& constants) {
    return std::exp(-decoherence_exponent(delta_e, t, constants));
}

DensityMatrix density_matrix_short_time(const TwoLevelSpec& spec, Duration t) {
    const double tau = decoherence_exponent(spec.delta_e(), t, spec.constants());
    if (tau > kShortTimeMaxTau)
        throw OutOfValidityError("linear density matrix requires tau <= 0.5, got tau = " + std::to_string(tau));
    return two_level_matrix(spec, 1.0 - tau);
}

DensityMatrix density_matrix_mean(const TwoLevelSpec& spec, Duration t) {
    return two_level_matrix(spec, decoherence_factor(spec.delta_e(), t, spec.constants()));
}

DensityMatrix density_matrix_mean(const NLevelState& state0, Duration t, const PhysicalConstants& constants,
                                  bool keep_phase) {
    require_nonnegative(t);
    const std::size_t n = state0.dimension();
    const DensityMatrix rho0 = density_of(state0);
    std::vector<Complex> e(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const Energy split = abs(state0.energy(i) - state0.energy(j));
            Complex v = rho0(i, j) * decoherence_factor(split, t, constants);
            if (keep_phase && i != j) {
                const double angle = -(state0.energy(i).mev - state0.energy(j).mev) * t.seconds / constants.hbar();
                v *= std::polar(1.0, angle);
            }
            e[i * n + j] = v;
        }
    }
    return DensityMatrix::unchecked(n, std::move(e));
}

}  // namespace collapse::analytic
