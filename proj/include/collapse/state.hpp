#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "collapse/units.hpp"

namespace collapse {

using Complex = std::complex<double>;

/// Normalized amplitude vector over the eigenbasis of a diagonal Hamiltonian.
class NLevelState {
public:
    /// Normalizes the amplitudes; relative phases are kept.
    /// Throws ValidationError on length mismatch, fewer than two levels,
    /// non-finite entries or an all-zero amplitude vector.
    static NLevelState make(std::vector<Complex> amplitudes, std::vector<Energy> energies);

    /// Two-level state sqrt(alpha)|1> + sqrt(1 - alpha)|2> with energies (0, delta_e).
    static NLevelState two_level(double alpha, Energy delta_e);

    std::size_t dimension() const { return amplitudes_.size(); }
    std::span<const Complex> amplitudes() const { return amplitudes_; }
    std::span<const Energy> energies() const { return energies_; }
    const Complex& amplitude(std::size_t i) const { return amplitudes_[i]; }
    Energy energy(std::size_t i) const { return energies_[i]; }
    double population(std::size_t i) const { return std::norm(amplitudes_[i]); }

    /// Largest minus smallest level energy.
    Energy energy_spread() const;

    /// Same energies, new amplitudes (normalized again).
    NLevelState with_amplitudes(std::vector<Complex> amplitudes) const;

private:
    NLevelState(std::vector<Complex> a, std::vector<Energy> e)
        : amplitudes_(std::move(a)), energies_(std::move(e)) {}

    std::vector<Complex> amplitudes_;
    std::vector<Energy> energies_;
};

/// Square complex matrix, row-major. Hermitian with unit trace.
class DensityMatrix {
public:
    /// Validates Hermiticity (|rho_ij - conj(rho_ji)| <= 1e-12) and |tr - 1| <= trace_tol.
    static DensityMatrix from_entries(std::size_t dim, std::vector<Complex> entries,
                                      double trace_tol = 1e-12);

    /// Unchecked construction for accumulated ensemble averages.
    static DensityMatrix unchecked(std::size_t dim, std::vector<Complex> entries);

    std::size_t dimension() const { return dim_; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }
    std::span<const Complex> entries() const { return entries_; }

    Complex trace() const;
    /// Max over i,j of |rho_ij - conj(rho_ji)|.
    double hermiticity_error() const;
    /// Smallest eigenvalue of the Hermitian part.
    double min_eigenvalue() const;

private:
    DensityMatrix(std::size_t dim, std::vector<Complex> e) : dim_(dim), entries_(std::move(e)) {}

    std::size_t dim_;
    std::vector<Complex> entries_;
};

/// |psi><psi|
DensityMatrix density_of(const NLevelState& state);

/// <H> = sum_i |a_i|^2 E_i
Energy mean_energy(const NLevelState& state);

/// <H^2> - <H>^2 in MeV^2, clamped at zero.
double energy_variance(const NLevelState& state);

}  // namespace collapse
