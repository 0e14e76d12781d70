#include "collapse/state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "collapse/errors.hpp"

namespace collapse {

NLevelState NLevelState::make(std::vector<Complex> amplitudes, std::vector<Energy> energies) {
    if (amplitudes.size() != energies.size())
        throw ValidationError("state: " + std::to_string(amplitudes.size()) + " amplitudes but " +
                              std::to_string(energies.size()) + " energies");
    if (amplitudes.size() < 2) throw ValidationError("state: need at least two levels");

    double norm2 = 0.0;
    for (const auto& a : amplitudes) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
            throw ValidationError("state: non-finite amplitude");
        norm2 += std::norm(a);
    }
    for (const auto& e : energies)
        if (!std::isfinite(e.mev)) throw ValidationError("state: non-finite energy");
    if (norm2 == 0.0) throw ValidationError("state: all amplitudes are zero");

    if (std::fabs(norm2 - 1.0) > 1e-15) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& a : amplitudes) a *= inv;
    }
    return NLevelState(std::move(amplitudes), std::move(energies));
}

NLevelState NLevelState::two_level(double alpha, Energy delta_e) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("state: alpha must lie in [0, 1]");
    return make({Complex(std::sqrt(alpha), 0.0), Complex(std::sqrt(1.0 - alpha), 0.0)},
                {Energy{0.0}, delta_e});
}

Energy NLevelState::energy_spread() const {
    const auto [lo, hi] = std::minmax_element(energies_.begin(), energies_.end());
    return *hi - *lo;
}

NLevelState NLevelState::with_amplitudes(std::vector<Complex> amplitudes) const {
    return make(std::move(amplitudes), energies_);
}

DensityMatrix DensityMatrix::from_entries(std::size_t dim, std::vector<Complex> entries, double trace_tol) {
    if (dim == 0 || entries.size() != dim * dim) throw ValidationError("density matrix: shape mismatch");
    DensityMatrix rho(dim, std::move(entries));
    if (rho.hermiticity_error() > 1e-12) throw ValidationError("density matrix: not Hermitian");
    if (std::abs(rho.trace() - 1.0) > trace_tol) throw ValidationError("density matrix: trace != 1");
    return rho;
}

DensityMatrix DensityMatrix::unchecked(std::size_t dim, std::vector<Complex> entries) {
    return DensityMatrix(dim, std::move(entries));
}

Complex DensityMatrix::trace() const {
    Complex t{};
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

double DensityMatrix::hermiticity_error() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = i; j < dim_; ++j)
            worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return worst;
}

double DensityMatrix::min_eigenvalue() const {
    Eigen::MatrixXcd m(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j)
            m(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

DensityMatrix density_of(const NLevelState& state) {
    const std::size_t n = state.dimension();
    std::vector<Complex> e(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            e[i * n + j] = state.amplitude(i) * std::conj(state.amplitude(j));
    return DensityMatrix::unchecked(n, std::move(e));
}

Energy mean_energy(const NLevelState& state) {
    double m = 0.0;
    for (std::size_t i = 0; i < state.dimension(); ++i) m += state.population(i) * state.energy(i).mev;
    return {m};
}

double energy_variance(const NLevelState& state) {
    // Central form avoids cancellation when |<H>| >> spread.
    const double m = mean_energy(state).mev;
    double v = 0.0;
    for (std::size_t i = 0; i < state.dimension(); ++i) {
        const double d = state.energy(i).mev - m;
        v += state.population(i) * d * d;
    }
    return std::max(v, 0.0);
}

}  // namespace collapse
