// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "collapse/analytic.hpp"
#include "collapse/cli.hpp"
#include "collapse/errors.hpp"
#include "collapse/io.hpp"
#include "collapse/sde.hpp"
#include "collapse/structure.hpp"
#include "tree_gen.hpp"

using namespace collapse;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

sde::SdeConfig benchmark(double alpha, double delta_e, double t_max, std::uint64_t seed, std::size_t stride = 1) {
    return sde::SdeConfig{NLevelState::two_level(alpha, Energy{delta_e}),
                          PhysicalConstants::dimensionless(),
                          Duration{1e-3},
                          Duration{t_max},
                          2000,
                          seed,
                          stride};
}

int run_cli(std::vector<std::string> args, std::string* out = nullptr) {
    args.insert(args.begin(), "collapse-lab");
    std::ostringstream o, e;
    const int code = cli::run(args, o, e);
    if (out) *out = o.str();
    return code;
}

Outcome kaon_arithmetic() {
    const auto t0 = Clock::now();
    std::string out;
    if (run_cli({"kaon", "--json"}, &out) != 0) return {false, "kaon command failed"};
    const double elapsed = seconds_since(t0);
    const auto j = io::json::parse(out);
    const double de = j["delta_e_total_mev"].get<double>();
    const double tc = j["predicted_tc_seconds"].get<double>();
    const double rel = std::fabs(tc - 5.02e-5) / 5.02e-5;
    std::ostringstream d;
    d << "dE = " << de << " MeV, t_c = " << tc << " s (rel. dev. " << rel << "), order 1e" << std::floor(std::log10(tc))
      << ", " << elapsed << " s";
    const bool same_order = std::fabs(std::log10(tc / 1e-4)) < 1.0;
    return {de == 400.0 && rel <= 0.005 && same_order && elapsed < 1.0, d.str()};
}

Outcome oracle_equivalence() {
    const auto t0 = Clock::now();
    const auto st = sde::run_ensemble(benchmark(0.5, 1.0, 3.0, 2024));
    const double elapsed = seconds_since(t0);
    double worst_coherence = 0.0, worst_z = 0.0;
    for (std::size_t r = 0; r < st.times.size(); ++r) {
        const double t = st.times[r].seconds;
        worst_coherence = std::max(worst_coherence, std::fabs(st.mean_density[r](0, 1).real() - 0.5 * std::exp(-t)));
        const double se = st.density_stderr_re[r][0];
        const double dev = std::fabs(st.mean_density[r](0, 0).real() - 0.5);
        if (se > 0) worst_z = std::max(worst_z, dev / se);
        else if (dev > 1e-12) worst_z = INFINITY;
    }
    std::ostringstream d;
    d << st.times.size() << " records, max |re rho12 - e^-t/2| = " << worst_coherence
      << ", max |rho11 - 0.5| / SE = " << worst_z << ", " << elapsed << " s";
    return {worst_coherence < 0.015 && worst_z < 3.0 && elapsed < 60.0, d.str()};
}

Outcome born_rule() {
    const auto cfg = benchmark(0.25, 1.0, 20.0, 7, 1000);
    const auto st = sde::run_ensemble(cfg);
    const auto rep = sde::born_rule_check(st, cfg.state0);
    const double n = 2000.0;
    const double half_width = 3.0 * std::sqrt(0.25 * 0.75 / n);
    const double f = static_cast<double>(st.outcome_counts[0]) / n;
    std::ostringstream d;
    d << "level-1 fraction " << f << " (interval 0.25 +/- " << half_width << "), undecided " << rep.undecided;
    return {std::fabs(f - 0.25) <= half_width, d.str()};
}

Outcome inverse_square() {
    const auto a = sde::run_ensemble(benchmark(0.5, 1.0, 2.0, 101));
    const auto b = sde::run_ensemble(benchmark(0.5, 2.0, 0.5, 102));
    if (!a.measured_collapse_time || !b.measured_collapse_time) return {false, "collapse time not reached"};
    const double ratio = b.measured_collapse_time->seconds / a.measured_collapse_time->seconds;
    const PhysicalConstants c;
    double worst = 0.0;
    for (double de : {1e-3, 0.7, 1.0, 400.0, 1e5, 3.3e12}) {
        const double t1 = analytic::collapse_time(Energy{de}, c).collapse_time->seconds;
        const double t2 = analytic::collapse_time(Energy{2 * de}, c).collapse_time->seconds;
        worst = std::max(worst, std::fabs(t2 - t1 / 4) / (t1 / 4));
    }
    std::ostringstream d;
    d << "t_c(1) = " << a.measured_collapse_time->seconds << ", t_c(2) = " << b.measured_collapse_time->seconds
      << ", ratio " << ratio << "; analytic rel. err " << worst;
    return {std::fabs(ratio - 0.25) <= 0.025 && worst <= 1e-12, d.str()};
}

Outcome zero_difference() {
    const auto st = sde::run_ensemble(benchmark(0.5, 0.0, 3.0, 5, 100));
    const double diff = std::abs(st.mean_density.back()(0, 1) - st.mean_density.front()(0, 1));
    const double se = st.density_stderr_re.back()[1];
    std::ostringstream d;
    d << "|rho12(t_max) - rho12(0)| = " << diff << " (3 SE = " << 3 * se << "), outcomes "
      << st.n_trajectories - st.undecided();
    // every trajectory is stationary, so SE is 0 and the deviation must vanish identically
    return {diff <= 3 * se && st.undecided() == st.n_trajectories, d.str()};
}

Outcome short_time_consistency() {
    const auto c = PhysicalConstants::dimensionless();
    double worst = 0.0;
    bool ok = true;
    for (int g = 0; g <= 20; ++g) {
        const double alpha = g / 20.0;
        const auto spec = analytic::TwoLevelSpec::make(alpha, 1.0 - alpha, Energy{1.0}, c);
        const double scale = std::sqrt(alpha * (1.0 - alpha));
        for (int i = 0; i <= 500; ++i) {
            const Duration t{0.05 * i / 500.0};
            const double diff = std::fabs(analytic::density_matrix_short_time(spec, t)(0, 1).real() -
                                          analytic::density_matrix_mean(spec, t)(0, 1).real());
            ok = ok && diff <= 2e-3 * scale;
            if (scale > 0) worst = std::max(worst, diff / scale);
        }
    }
    std::ostringstream d;
    d << "max |linear - exp| / sqrt(ab) = " << worst << " over tau <= 0.05, 21 alphas";
    return {ok, d.str()};
}

Outcome aggregation_properties() {
    std::mt19937_64 rng(424242);
    int cases = 0, failures = 0;
    for (; cases < 2000; ++cases) {
        const auto a = testing::random_tree(rng, 4);
        const auto b = testing::random_tree_with_leaves(rng, structure::leaves(a).size());
        bool ok = structure::total_energy_difference(a, b) == structure::total_energy_difference(b, a);
        ok = ok && structure::total_energy_difference(a, a).mev == 0.0;
        const double m = std::uniform_real_distribution<double>(0, 1000)(rng);
        const auto pa = structure::ParticleNode::composite("pa", {a, structure::ParticleNode::leaf("x", m)});
        const auto pb = structure::ParticleNode::composite("pb", {b, structure::ParticleNode::leaf("y", m)});
        const double base = structure::total_energy_difference(a, b).mev;
        ok = ok && std::fabs(structure::total_energy_difference(pa, pb).mev - base) <= 1e-12 * std::max(1.0, base);
        const auto c = testing::random_tree_with_leaves(rng, structure::leaves(a).size() + 1 + cases % 3);
        try {
            structure::total_energy_difference(a, c);
            ok = false;
        } catch (const ValidationError&) {
        }
        if (!ok) ++failures;
    }
    std::ostringstream d;
    d << cases << " random cases, " << failures << " failures";
    return {failures == 0, d.str()};
}

Outcome reproducibility() {
    const auto dir = fs::temp_directory_path() / "collapse_lab_acceptance";
    fs::create_directories(dir);
    const auto p1 = dir / "p1.csv", p8 = dir / "p8.csv";
    auto args = [](const fs::path& out, const char* threads) {
        return std::vector<std::string>{"simulate", "--delta-e", "1",    "--alpha",     "0.3",         "--trajectories",
                                        "2000",     "--dt",      "1e-3", "--t-max",     "1",           "--seed",
                                        "987654321", "--dimensionless", "--threads", threads, "--out", out.string()};
    };
    if (run_cli(args(p1, "1")) != 0 || run_cli(args(p8, "8")) != 0) return {false, "simulate failed"};
    const auto a = io::read_file(p1), b = io::read_file(p8);
    std::ostringstream d;
    d << a.size() << " bytes vs " << b.size() << " bytes, " << (a == b ? "identical" : "DIFFERENT");
    return {a == b && !a.empty(), d.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 kaon arithmetic", kaon_arithmetic},
        {"2 oracle equivalence", oracle_equivalence},
        {"3 born rule", born_rule},
        {"4 inverse-square law", inverse_square},
        {"5 zero-difference null", zero_difference},
        {"6 short-time consistency", short_time_consistency},
        {"7 aggregation properties", aggregation_properties},
        {"8 reproducibility", reproducibility},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << ": " << o.detail << std::endl;
        failed += o.pass ? 0 : 1;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
