#include "collapse/sde.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <string>
#include <thread>

#include "collapse/errors.hpp"
#include "collapse/rng.hpp"

namespace collapse::sde {

double coupling_gamma(const PhysicalConstants& constants) {
    return 2.0 / (constants.k() * constants.hbar_times_planck_energy());
}

void SdeConfig::validate() const {
    if (!std::isfinite(dt.seconds) || dt.seconds <= 0.0) throw ValidationError("sde: dt must be > 0");
    if (!std::isfinite(t_max.seconds) || t_max.seconds < dt.seconds)
        throw ValidationError("sde: t_max must be >= dt");
    if (n_trajectories < 1) throw ValidationError("sde: need at least one trajectory");
    if (record_stride < 1) throw ValidationError("sde: record_stride must be >= 1");
    if (!(collapse_threshold > 0.5 && collapse_threshold <= 1.0))
        throw ValidationError("sde: collapse threshold must lie in (0.5, 1]");
    const double spread = state0.energy_spread().mev;
    const double stiffness = coupling_gamma(constants) * spread * spread * dt.seconds;
    if (stiffness > kStabilityBound)
        throw ValidationError("sde: gamma * dE^2 * dt = " + std::to_string(stiffness) + " exceeds stability bound " +
                              std::to_string(kStabilityBound) + "; reduce dt");
}

std::size_t SdeConfig::n_steps() const {
    return static_cast<std::size_t>(std::llround(t_max.seconds / dt.seconds));
}

std::vector<std::size_t> SdeConfig::recorded_steps() const {
    const std::size_t n = n_steps();
    std::vector<std::size_t> out;
    out.reserve(n / record_stride + 2);
    for (std::size_t s = 0; s <= n; s += record_stride) out.push_back(s);
    if (out.back() != n) out.push_back(n);
    return out;
}

namespace detail {

double euler_maruyama_update(std::span<Complex> amplitudes, std::span<const double> energies, double gamma,
                             double inv_hbar, double dt, double dW, bool keep_phase) {
    double mean = 0.0;
    for (std::size_t i = 0; i < amplitudes.size(); ++i) mean += std::norm(amplitudes[i]) * energies[i];

    const double sqrt_gamma = std::sqrt(gamma);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
        const double d = energies[i] - mean;
        amplitudes[i] *= 1.0 - 0.5 * gamma * d * d * dt + sqrt_gamma * d * dW;
        if (keep_phase) amplitudes[i] *= std::polar(1.0, -energies[i] * dt * inv_hbar);
        norm2 += std::norm(amplitudes[i]);
    }
    return norm2;
}

}  // namespace detail

namespace {

// Advances amplitudes by one step and renormalizes; false on a non-finite result.
bool advance(std::span<Complex> amps, std::span<const double> energies, double gamma, double inv_hbar, double dt,
             double dW, bool keep_phase) {
    const double norm2 = detail::euler_maruyama_update(amps, energies, gamma, inv_hbar, dt, dW, keep_phase);
    if (!std::isfinite(norm2) || norm2 <= 0.0) return false;
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& a : amps) a *= inv;
    return true;
}

std::optional<std::size_t> decided_level(std::span<const Complex> amps, double threshold) {
    for (std::size_t i = 0; i < amps.size(); ++i)
        if (std::norm(amps[i]) >= threshold) return i;
    return std::nullopt;
}

std::vector<double> energies_of(const NLevelState& s) {
    std::vector<double> e(s.dimension());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = s.energy(i).mev;
    return e;
}

// Integrates one trajectory, calling `observe(record_index, amplitudes, outcome)` at
// each recorded step. Returns the outcome and the step at which it was reached.
template <class Observer>
std::pair<std::optional<std::size_t>, std::size_t> integrate(const SdeConfig& config, std::uint64_t index,
                                                              std::span<const std::size_t> recorded,
                                                              Observer&& observe) {
    const auto energies = energies_of(config.state0);
    std::vector<Complex> amps(config.state0.amplitudes().begin(), config.state0.amplitudes().end());
    const double gamma = coupling_gamma(config.constants);
    const double inv_hbar = 1.0 / config.constants.hbar();
    const double dt = config.dt.seconds;
    const double sqrt_dt = std::sqrt(dt);
    const NoiseStream noise(config.seed, index);

    std::optional<std::size_t> outcome = decided_level(amps, config.collapse_threshold);
    std::size_t outcome_step = 0;
    std::size_t next_record = 0;
    const std::size_t n_steps = recorded.back();
    for (std::size_t s = 0;; ++s) {
        if (next_record < recorded.size() && recorded[next_record] == s) {
            observe(next_record, std::span<const Complex>(amps), outcome);
            ++next_record;
        }
        if (s == n_steps) break;
        const double dW = sqrt_dt * noise.normal(s);
        if (!advance(amps, energies, gamma, inv_hbar, dt, dW, config.keep_phase))
            throw NumericFailure("trajectory " + std::to_string(index) + ": non-finite state at step " +
                                     std::to_string(s + 1),
                                 s + 1);
        if (!outcome) {
            outcome = decided_level(amps, config.collapse_threshold);
            if (outcome) outcome_step = s + 1;
        }
    }
    return {outcome, outcome_step};
}

// Per-record sums over a block of trajectories, accumulated in trajectory order.
struct Partial {
    std::size_t n = 0;
    std::size_t records = 0;
    std::vector<Complex> rho;       // records * n * n
    std::vector<double> rho_sq_re;  // records * n * n
    std::vector<double> rho_sq_im;
    std::vector<double> energy;     // records
    std::vector<double> energy_sq;
    std::vector<double> variance;
    std::vector<std::size_t> decided;  // records * n
    std::vector<std::size_t> failed;

    Partial(std::size_t dim, std::size_t recs)
        : n(dim), records(recs), rho(recs * dim * dim), rho_sq_re(recs * dim * dim), rho_sq_im(recs * dim * dim),
          energy(recs), energy_sq(recs), variance(recs), decided(recs * dim) {}

    void add(const Partial& o) {
        for (std::size_t i = 0; i < rho.size(); ++i) {
            rho[i] += o.rho[i];
            rho_sq_re[i] += o.rho_sq_re[i];
            rho_sq_im[i] += o.rho_sq_im[i];
        }
        for (std::size_t r = 0; r < records; ++r) {
            energy[r] += o.energy[r];
            energy_sq[r] += o.energy_sq[r];
            variance[r] += o.variance[r];
        }
        for (std::size_t i = 0; i < decided.size(); ++i) decided[i] += o.decided[i];
        failed.insert(failed.end(), o.failed.begin(), o.failed.end());
    }
};

constexpr std::size_t kBlockSize = 32;

Partial run_block(const SdeConfig& config, std::span<const std::size_t> recorded, std::size_t first,
                  std::size_t last) {
    const std::size_t n = config.state0.dimension();
    const auto energies = energies_of(config.state0);
    Partial p(n, recorded.size());
    for (std::size_t t = first; t < last; ++t) {
        Partial local(n, recorded.size());
        try {
            integrate(config, t, recorded,
                      [&](std::size_t r, std::span<const Complex> a, const std::optional<std::size_t>& outcome) {
                          Complex* rho = &local.rho[r * n * n];
                          double* sq_re = &local.rho_sq_re[r * n * n];
                          double* sq_im = &local.rho_sq_im[r * n * n];
                          double mean = 0.0;
                          for (std::size_t i = 0; i < n; ++i) {
                              for (std::size_t j = 0; j < n; ++j) {
                                  const Complex v = a[i] * std::conj(a[j]);
                                  rho[i * n + j] = v;
                                  sq_re[i * n + j] = v.real() * v.real();
                                  sq_im[i * n + j] = v.imag() * v.imag();
                              }
                              mean += std::norm(a[i]) * energies[i];
                          }
                          double var = 0.0;
                          for (std::size_t i = 0; i < n; ++i) {
                              const double d = energies[i] - mean;
                              var += std::norm(a[i]) * d * d;
                          }
                          local.energy[r] = mean;
                          local.energy_sq[r] = mean * mean;
                          local.variance[r] = var;
                          if (outcome) local.decided[r * n + *outcome] = 1;
                      });
        } catch (const NumericFailure&) {
            p.failed.push_back(t);
            continue;
        }
        p.add(local);
    }
    return p;
}

double standard_error(double sum, double sum_sq, std::size_t count) {
    if (count < 2) return 0.0;
    const double nn = static_cast<double>(count);
    const double mean = sum / nn;
    const double var = std::max(0.0, (sum_sq - nn * mean * mean) / (nn - 1.0));
    return std::sqrt(var / nn);
}

}  // namespace

NLevelState step(const NLevelState& state, const PhysicalConstants& constants, Duration dt, double dW,
                 bool keep_phase) {
    std::vector<Complex> amps(state.amplitudes().begin(), state.amplitudes().end());
    const auto energies = energies_of(state);
    if (!advance(amps, energies, coupling_gamma(constants), 1.0 / constants.hbar(), dt.seconds, dW, keep_phase) ||
        std::any_of(amps.begin(), amps.end(),
                    [](const Complex& a) { return !std::isfinite(a.real()) || !std::isfinite(a.imag()); }))
        throw NumericFailure("step: non-finite state", 0);
    return state.with_amplitudes(std::move(amps));
}

TrajectoryRecord run_trajectory(const SdeConfig& config, std::uint64_t trajectory_index) {
    config.validate();
    const auto recorded = config.recorded_steps();
    TrajectoryRecord rec;
    rec.times.reserve(recorded.size());
    rec.states.reserve(recorded.size());
    const auto [outcome, outcome_step] =
        integrate(config, trajectory_index, recorded,
                  [&](std::size_t r, std::span<const Complex> a, const std::optional<std::size_t>&) {
                      rec.times.push_back(Duration{static_cast<double>(recorded[r]) * config.dt.seconds});
                      rec.states.push_back(config.state0.with_amplitudes({a.begin(), a.end()}));
                  });
    rec.outcome = outcome;
    if (outcome) rec.outcome_time = Duration{static_cast<double>(outcome_step) * config.dt.seconds};
    return rec;
}

EnsembleStats run_ensemble(const SdeConfig& config, ExecutionPolicy policy) {
    config.validate();
    const auto recorded = config.recorded_steps();
    const std::size_t n = config.state0.dimension();
    const std::size_t records = recorded.size();
    const std::size_t n_blocks = (config.n_trajectories + kBlockSize - 1) / kBlockSize;

    unsigned threads = policy.threads ? policy.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_blocks));

    // Blocks are computed in batches and merged strictly in block order, which
    // makes the floating-point reduction independent of the thread count.
    Partial total(n, records);
    const std::size_t batch = std::max<std::size_t>(threads * 2, 1);
    for (std::size_t b0 = 0; b0 < n_blocks; b0 += batch) {
        const std::size_t b1 = std::min(n_blocks, b0 + batch);
        std::vector<std::optional<Partial>> parts(b1 - b0);
        std::atomic<std::size_t> next{b0};
        std::mutex error_mutex;
        std::exception_ptr error;
        auto worker = [&] {
            for (std::size_t b; (b = next.fetch_add(1)) < b1;) {
                try {
                    const std::size_t first = b * kBlockSize;
                    const std::size_t last = std::min(config.n_trajectories, first + kBlockSize);
                    parts[b - b0].emplace(run_block(config, recorded, first, last));
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        };
        if (threads <= 1) {
            worker();
        } else {
            std::vector<std::jthread> pool;
            for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        }
        if (error) std::rethrow_exception(error);
        for (auto& p : parts) total.add(*p);
    }

    if (!total.failed.empty()) {
        std::string list;
        for (std::size_t i = 0; i < total.failed.size() && i < 10; ++i)
            list += (i ? ", " : "") + std::to_string(total.failed[i]);
        if (total.failed.size() > 10) list += ", ...";
        throw EnsembleFailure(std::to_string(total.failed.size()) + " trajectories failed numerically: " + list,
                              total.failed);
    }

    const std::size_t count = config.n_trajectories;
    const double inv = 1.0 / static_cast<double>(count);
    EnsembleStats st;
    st.dimension = n;
    st.n_trajectories = count;
    st.keep_phase = config.keep_phase;
    st.collapse_threshold = config.collapse_threshold;
    st.times.reserve(records);
    for (std::size_t r = 0; r < records; ++r) {
        st.times.push_back(Duration{static_cast<double>(recorded[r]) * config.dt.seconds});
        std::vector<Complex> mean(n * n);
        std::vector<double> se_re(n * n), se_im(n * n);
        for (std::size_t e = 0; e < n * n; ++e) {
            const std::size_t k = r * n * n + e;
            mean[e] = total.rho[k] * inv;
            se_re[e] = standard_error(total.rho[k].real(), total.rho_sq_re[k], count);
            se_im[e] = standard_error(total.rho[k].imag(), total.rho_sq_im[k], count);
        }
        st.mean_density.push_back(DensityMatrix::unchecked(n, std::move(mean)));
        st.density_stderr_re.push_back(std::move(se_re));
        st.density_stderr_im.push_back(std::move(se_im));
        st.mean_energy.push_back(total.energy[r] * inv);
        st.mean_energy_stderr.push_back(standard_error(total.energy[r], total.energy_sq[r], count));
        st.mean_energy_variance.push_back(total.variance[r] * inv);
        st.decided_counts.emplace_back(total.decided.begin() + static_cast<std::ptrdiff_t>(r * n),
                                       total.decided.begin() + static_cast<std::ptrdiff_t>((r + 1) * n));
    }
    st.outcome_counts = st.decided_counts.back();
    st.measured_collapse_time = measure_collapse_time(st);
    return st;
}

std::size_t EnsembleStats::undecided() const {
    std::size_t decided = 0;
    for (auto c : outcome_counts) decided += c;
    return n_trajectories - decided;
}

std::optional<Duration> measure_collapse_time(const EnsembleStats& stats, std::size_t i, std::size_t j) {
    if (stats.times.empty() || i >= stats.dimension || j >= stats.dimension) return std::nullopt;
    const double initial = stats.coherence(0, i, j);
    if (initial == 0.0) return std::nullopt;
    const double target = std::exp(-1.0) * initial;
    for (std::size_t r = 0; r < stats.times.size(); ++r)
        if (stats.coherence(r, i, j) <= target) return stats.times[r];
    return std::nullopt;
}

double fitted_decoherence_rate(const EnsembleStats& stats, Duration t_lo, Duration t_hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t r = 0; r < stats.times.size(); ++r) {
        const double t = stats.times[r].seconds;
        const double c = stats.coherence(r);
        if (t < t_lo.seconds || t > t_hi.seconds || c <= 0.0) continue;
        const double y = std::log(c);
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
        ++m;
    }
    if (m < 2) throw ValidationError("fitted_decoherence_rate: fewer than two usable records in window");
    const double mm = static_cast<double>(m);
    return -(mm * sxy - sx * sy) / (mm * sxx - sx * sx);
}

BornReport born_rule_check(const EnsembleStats& stats, const NLevelState& state0) {
    BornReport rep;
    rep.n_trajectories = stats.n_trajectories;
    rep.undecided = stats.undecided();
    const double nn = static_cast<double>(stats.n_trajectories);
    rep.z_scores_skipped = static_cast<double>(rep.undecided) > 0.01 * nn;
    for (std::size_t i = 0; i < state0.dimension(); ++i) {
        BornLevel lv;
        lv.expected = state0.population(i);
        lv.frequency = static_cast<double>(stats.outcome_counts.at(i)) / nn;
        const double p = lv.expected;
        if (p > 0.0 && p < 1.0 && nn * std::min(p, 1.0 - p) < 5.0) rep.low_power = true;
        if (!rep.z_scores_skipped) {
            const double sigma = std::sqrt(p * (1.0 - p) / nn);
            if (sigma > 0.0)
                lv.z = (lv.frequency - p) / sigma;
            else
                lv.z = lv.frequency == p ? 0.0 : std::copysign(INFINITY, lv.frequency - p);
        }
        rep.levels.push_back(lv);
    }
    return rep;
}

}  // namespace collapse::sde
