#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "collapse/state.hpp"
#include "collapse/units.hpp"

namespace collapse::sde {

/// Noise coupling gamma = 2 / (k hbar E_p), in 1/(MeV^2 s). With this value the
/// ensemble-mean coherence rho_ij decays at rate (E_i - E_j)^2 / (k hbar E_p).
double coupling_gamma(const PhysicalConstants& constants);

/// Largest admissible gamma * (E_max - E_min)^2 * dt.
inline constexpr double kStabilityBound = 0.1;
inline constexpr double kDefaultCollapseThreshold = 1.0 - 1e-4;

struct SdeConfig {
    NLevelState state0;
    PhysicalConstants constants;
    Duration dt;
    Duration t_max;
    std::size_t n_trajectories = 1;
    std::uint64_t seed = 0;
    std::size_t record_stride = 1;
    /// Keep the deterministic e^{-i E t / hbar} rotation. Off means the
    /// interaction picture, which leaves populations and |rho_ij| untouched.
    bool keep_phase = false;
    /// Population at which a trajectory is declared collapsed onto a level.
    double collapse_threshold = kDefaultCollapseThreshold;

    /// Throws ValidationError on any violated precondition, including the stability bound.
    void validate() const;
    /// Number of integration steps, round(t_max / dt).
    std::size_t n_steps() const;
    /// Step indices at which the state is recorded (every stride, plus the final step).
    std::vector<std::size_t> recorded_steps() const;
};

/// One Euler-Maruyama step of
///   d|psi> = [ -(i/hbar) H dt - (gamma/2)(H - <H>)^2 dt + sqrt(gamma)(H - <H>) dW ] |psi>
/// followed by renormalization. The free rotation is applied exactly (H is diagonal).
/// Throws NumericFailure (step index 0) on a non-finite result.
NLevelState step(const NLevelState& state, const PhysicalConstants& constants, Duration dt, double dW,
                 bool keep_phase = true);

namespace detail {

/// In-place unnormalized update of the amplitudes; returns the squared norm after the update.
double euler_maruyama_update(std::span<Complex> amplitudes, std::span<const double> energies, double gamma,
                             double inv_hbar, double dt, double dW, bool keep_phase);

}  // namespace detail

struct TrajectoryRecord {
    std::vector<Duration> times;
    std::vector<NLevelState> states;
    std::optional<std::size_t> outcome;  ///< level index; empty while undecided
    std::optional<Duration> outcome_time;
};

/// Integrates one trajectory with noise keyed by (config.seed, trajectory_index).
/// NumericFailure messages name the trajectory and carry the failing step index.
TrajectoryRecord run_trajectory(const SdeConfig& config, std::uint64_t trajectory_index);

struct EnsembleStats {
    std::size_t dimension = 0;
    std::size_t n_trajectories = 0;
    bool keep_phase = false;
    double collapse_threshold = kDefaultCollapseThreshold;

    std::vector<Duration> times;
    std::vector<DensityMatrix> mean_density;
    /// Standard errors of Re and Im of each density entry, row-major per time.
    std::vector<std::vector<double>> density_stderr_re;
    std::vector<std::vector<double>> density_stderr_im;
    std::vector<double> mean_energy;         ///< MeV
    std::vector<double> mean_energy_stderr;  ///< MeV
    std::vector<double> mean_energy_variance;  ///< MeV^2
    /// decided_counts[r][level]: trajectories decided for `level` at or before times[r].
    std::vector<std::vector<std::size_t>> decided_counts;
    std::vector<std::size_t> outcome_counts;
    std::optional<Duration> measured_collapse_time;

    std::size_t undecided() const;
    /// |mean rho_ij| at record r.
    double coherence(std::size_t r, std::size_t i = 0, std::size_t j = 1) const {
        return std::abs(mean_density[r](i, j));
    }
};

struct ExecutionPolicy {
    /// Worker threads; 0 means std::thread::hardware_concurrency().
    unsigned threads = 0;
};

/// Runs every trajectory and reduces in a fixed order, so the result is
/// bit-identical for any thread count. Throws EnsembleFailure listing every failed trajectory.
EnsembleStats run_ensemble(const SdeConfig& config, ExecutionPolicy policy = {});

/// First recorded time with |mean rho_ij| <= e^{-1} |rho_ij(0)|; empty if never
/// reached or if the initial coherence is zero.
std::optional<Duration> measure_collapse_time(const EnsembleStats& stats, std::size_t i = 0, std::size_t j = 1);

/// Least-squares slope of -log|mean rho_01| over records with times in [t_lo, t_hi].
double fitted_decoherence_rate(const EnsembleStats& stats, Duration t_lo, Duration t_hi);

struct BornLevel {
    double frequency = 0.0;
    double expected = 0.0;
    std::optional<double> z;  ///< empty when z-scores were skipped
};

struct BornReport {
    std::vector<BornLevel> levels;
    std::size_t n_trajectories = 0;
    std::size_t undecided = 0;
    bool z_scores_skipped = false;  ///< fewer than 99% of trajectories decided
    bool low_power = false;          ///< N min(p, 1 - p) < 5 for some level with 0 < p < 1
};

/// Compares outcome frequencies with initial populations: z = (f - p) / sqrt(p (1 - p) / N).
BornReport born_rule_check(const EnsembleStats& stats, const NLevelState& state0);

}  // namespace collapse::sde
