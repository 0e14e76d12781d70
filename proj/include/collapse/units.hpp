#pragma once

#include <cmath>
#include <compare>

namespace collapse {

/// Energy in MeV.
struct Energy {
    double mev = 0.0;

    constexpr auto operator<=>(const Energy&) const = default;
    constexpr Energy operator+(Energy o) const { return {mev + o.mev}; }
    constexpr Energy operator-(Energy o) const { return {mev - o.mev}; }
    constexpr Energy& operator+=(Energy o) { mev += o.mev; return *this; }
};

inline Energy abs(Energy e) { return {std::fabs(e.mev)}; }

/// Time in seconds (or in units of hbar / MeV-free units in dimensionless mode).
struct Duration {
    double seconds = 0.0;

    constexpr auto operator<=>(const Duration&) const = default;
};

/// hbar [MeV s], Planck energy [MeV] and the dimensionless collapse constant k.
class PhysicalConstants {
public:
    static constexpr double kCodataHbar = 6.582119569e-22;
    static constexpr double kPlanckEnergy = 1.220890e22;

    /// CODATA hbar, PDG Planck energy, k = 1.
    PhysicalConstants() = default;

    /// hbar = E_p = 1 with the given k.
    static PhysicalConstants dimensionless(double k = 1.0);

    double hbar() const { return hbar_; }
    double planck_energy() const { return planck_energy_; }
    double k() const { return k_; }

    /// hbar * E_p in MeV^2 s.
    double hbar_times_planck_energy() const { return hbar_ * planck_energy_; }

    PhysicalConstants with_k(double k) const;

    bool operator==(const PhysicalConstants&) const = default;

private:
    friend PhysicalConstants make_constants(double, double, double);
    PhysicalConstants(double hbar, double planck_energy, double k)
        : hbar_(hbar), planck_energy_(planck_energy), k_(k) {}

    double hbar_ = kCodataHbar;
    double planck_energy_ = kPlanckEnergy;
    double k_ = 1.0;
};

/// Throws ValidationError unless every argument is finite and strictly positive.
PhysicalConstants make_constants(double hbar, double planck_energy, double k);

}  // namespace collapse
