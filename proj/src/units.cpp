#include "collapse/units.hpp"

#include <string>

#include "collapse/errors.hpp"

namespace collapse {

namespace {

void require_positive(double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0)
        throw ValidationError(std::string(name) + " must be finite and > 0, got " + std::to_string(v));
}

}  // namespace

PhysicalConstants make_constants(double hbar, double planck_energy, double k) {
    require_positive(hbar, "hbar");
    require_positive(planck_energy, "planck_energy");
    require_positive(k, "k");
    return PhysicalConstants(hbar, planck_energy, k);
}

PhysicalConstants PhysicalConstants::dimensionless(double k) { return make_constants(1.0, 1.0, k); }

PhysicalConstants PhysicalConstants::with_k(double k) const { return make_constants(hbar_, planck_energy_, k); }

}  // namespace collapse
