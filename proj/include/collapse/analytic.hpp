#pragma once

#include <optional>

#include "collapse/state.hpp"
#include "collapse/units.hpp"

namespace collapse::analytic {

/// Two-level system: initial populations alpha0, beta0 and level splitting delta_e.
class TwoLevelSpec {
public:
    /// Throws ValidationError unless alpha0, beta0 in [0,1], alpha0 + beta0 = 1 (1e-12) and delta_e >= 0.
    static TwoLevelSpec make(double alpha0, double beta0, Energy delta_e, PhysicalConstants constants = {});

    double alpha0() const { return alpha0_; }
    double beta0() const { return beta0_; }
    Energy delta_e() const { return delta_e_; }
    const PhysicalConstants& constants() const { return constants_; }

private:
    TwoLevelSpec(double a, double b, Energy de, PhysicalConstants c)
        : alpha0_(a), beta0_(b), delta_e_(de), constants_(c) {}

    double alpha0_;
    double beta0_;
    Energy delta_e_;
    PhysicalConstants constants_;
};

struct CollapsePrediction {
    std::optional<Duration> collapse_time;  ///< empty: the superposition does not collapse
    Energy delta_e_total;
    double k_used = 1.0;

    bool collapses() const { return collapse_time.has_value(); }
};

/// t_c = k hbar E_p / dE^2; no collapse when dE = 0.
CollapsePrediction collapse_time(Energy delta_e, const PhysicalConstants& constants);

/// Dimensionless decoherence exponent tau = dE^2 t / (k hbar E_p).
double decoherence_exponent(Energy delta_e, Duration t, const PhysicalConstants& constants);

/// exp(-tau). First order agrees with the linear factor 1 - tau.
double decoherence_factor(Energy delta_e, Duration t, const PhysicalConstants& constants);

/// Largest tau accepted by density_matrix_short_time.
inline constexpr double kShortTimeMaxTau = 0.5;

/// Linear-in-t density matrix: constant diagonals, rho_12 = (1 - tau) sqrt(alpha0 beta0).
/// Throws OutOfValidityError when tau > kShortTimeMaxTau.
DensityMatrix density_matrix_short_time(const TwoLevelSpec& spec, Duration t);

/// Exponential form, valid for all t >= 0: rho_12 = exp(-tau) sqrt(alpha0 beta0).
DensityMatrix density_matrix_mean(const TwoLevelSpec& spec, Duration t);

/// Ensemble-mean density matrix of an arbitrary N-level state under the
/// double-commutator master equation: rho_ij(t) = rho_ij(0) exp(-(E_i - E_j)^2 t / (k hbar E_p)),
/// times exp(-i (E_i - E_j) t / hbar) when the free phase is kept.
DensityMatrix density_matrix_mean(const NLevelState& state0, Duration t, const PhysicalConstants& constants,
                                  bool keep_phase = false);

}  // namespace collapse::analytic
