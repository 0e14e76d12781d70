#include "collapse/cli.hpp"

#include <cmath>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "collapse/analytic.hpp"
#include "collapse/errors.hpp"
#include "collapse/io.hpp"
#include "collapse/sde.hpp"
#include "collapse/structure.hpp"

namespace collapse::cli {

namespace {

using io::json;

struct SimulateArgs {
    double delta_e = 1.0;
    double alpha = 0.5;
    std::size_t trajectories = 1000;
    double dt = 1e-3;
    double t_max = 1.0;
    std::uint64_t seed = 0;
    double k = 1.0;
    std::string out;
    bool dimensionless = false;
    std::size_t record_stride = 1;
    unsigned threads = 0;
    bool keep_phase = false;
    double threshold = sde::kDefaultCollapseThreshold;
};

struct PredictArgs {
    std::string structure;
    double k = 1.0;
    std::string masses;
    std::optional<double> measured;
    std::string out;
};

struct SweepArgs {
    double min = 0.0;
    double max = 0.0;
    std::size_t points = 0;
    double k = 1.0;
    bool dimensionless = false;
    std::string out;
};

struct KaonArgs {
    double k = 1.0;
    std::string masses;
    bool json_only = false;
    std::string out;
};

void write_with_manifest(const std::string& out, std::string_view text, const json& manifest) {
    io::write_file(out, text);
    io::write_file(io::manifest_path(out), manifest.dump(2) + "\n");
}

int simulate(const SimulateArgs& a, std::ostream& out) {
    const auto constants =
        a.dimensionless ? PhysicalConstants::dimensionless(a.k) : make_constants(PhysicalConstants::kCodataHbar,
                                                                                 PhysicalConstants::kPlanckEnergy, a.k);
    if (!std::isfinite(a.delta_e) || a.delta_e < 0.0) throw ValidationError("--delta-e must be >= 0");
    sde::SdeConfig cfg{NLevelState::two_level(a.alpha, Energy{a.delta_e}),
                       constants,
                       Duration{a.dt},
                       Duration{a.t_max},
                       a.trajectories,
                       a.seed,
                       a.record_stride,
                       a.keep_phase,
                       a.threshold};
    const auto stats = sde::run_ensemble(cfg, {a.threads});

    std::ostringstream csv;
    io::write_simulation_csv(csv, stats, cfg);
    json params = {{"delta_e_mev", a.delta_e}, {"alpha", a.alpha},       {"trajectories", a.trajectories},
                   {"dt", a.dt},               {"t_max", a.t_max},       {"k", a.k},
                   {"dimensionless", a.dimensionless}, {"record_stride", a.record_stride},
                   {"keep_phase", a.keep_phase}, {"collapse_threshold", a.threshold}};
    json meta = {{"phase_term", a.keep_phase ? "kept" : "dropped (interaction picture)"},
                 {"collapse_threshold", a.threshold},
                 {"coupling_gamma", sde::coupling_gamma(constants)},
                 {"threads", a.threads},
                 {"undecided", stats.undecided()}};
    if (stats.measured_collapse_time)
        meta["measured_collapse_time"] = stats.measured_collapse_time->seconds;
    else
        meta["measured_collapse_time"] = nullptr;
    write_with_manifest(a.out, csv.str(), io::make_manifest("simulate", params, constants, a.seed, meta));
    out << "wrote " << stats.times.size() << " rows to " << a.out << '\n';
    return kOk;
}

std::optional<structure::MassTable> load_masses(const std::string& path) {
    if (path.empty()) return std::nullopt;
    return io::load_mass_table(path);
}

int predict(const PredictArgs& a, std::ostream& out) {
    const auto constants = PhysicalConstants().with_k(a.k);
    const auto masses = load_masses(a.masses);
    const auto spec = io::load_structure(a.structure, masses ? &*masses : nullptr);
    auto report = structure::predict_collapse_time(spec, constants);
    if (a.measured) report = structure::compare_hypotheses({report}, Duration{*a.measured}).front();
    const json j = io::to_json(report);
    out << j.dump(2) << '\n';
    if (!a.out.empty()) {
        json params = {{"structure", a.structure}, {"k", a.k}, {"masses", a.masses}};
        params["measured"] = a.measured ? json(*a.measured) : json(nullptr);
        write_with_manifest(a.out, j.dump(2) + "\n", io::make_manifest("predict", params, constants, std::nullopt));
    }
    return kOk;
}

int sweep(const SweepArgs& a, std::ostream& out) {
    if (!std::isfinite(a.min) || a.min <= 0.0)
        throw ValidationError("--delta-e-min must be > 0 (zero difference never collapses)");
    if (!std::isfinite(a.max) || a.max < a.min) throw ValidationError("--delta-e-max must be >= --delta-e-min");
    if (a.points < 1) throw ValidationError("--points must be >= 1");
    const auto constants = a.dimensionless ? PhysicalConstants::dimensionless(a.k) : PhysicalConstants().with_k(a.k);

    std::ostringstream csv;
    csv << "delta_e_mev,tc_seconds\n";
    const double log_ratio = std::log(a.max / a.min);
    for (std::size_t i = 0; i < a.points; ++i) {
        double de = a.min;
        if (a.points > 1)
            de = (i + 1 == a.points) ? a.max
                                     : a.min * std::exp(log_ratio * static_cast<double>(i) /
                                                        static_cast<double>(a.points - 1));
        const auto p = analytic::collapse_time(Energy{de}, constants);
        csv << io::format_number(de) << ',' << io::format_number(p.collapse_time->seconds) << '\n';
    }
    json params = {{"delta_e_min_mev", a.min}, {"delta_e_max_mev", a.max}, {"points", a.points},
                   {"k", a.k},                 {"dimensionless", a.dimensionless}};
    write_with_manifest(a.out, csv.str(), io::make_manifest("sweep", params, constants, std::nullopt));
    out << "wrote " << a.points << " rows to " << a.out << '\n';
    return kOk;
}

std::string describe(const structure::ParticleNode& node) {
    std::ostringstream s;
    s << node.name;
    if (node.elementary()) {
        s << " (" << io::format_number(node.mass->mev) << " MeV)";
    } else {
        s << " = [";
        for (std::size_t i = 0; i < node.constituents.size(); ++i)
            s << (i ? ", " : "") << describe(node.constituents[i]);
        s << ']';
    }
    return s.str();
}

int kaon(const KaonArgs& a, std::ostream& out) {
    const auto constants = PhysicalConstants().with_k(a.k);
    const auto masses = load_masses(a.masses).value_or(structure::default_quark_masses());
    const auto spec = structure::kaon_superposition(masses);
    const auto report = structure::predict_collapse_time(spec, constants);
    json j = io::to_json(report);
    j["reference_order_of_magnitude_seconds"] = 1e-4;

    if (a.json_only) {
        out << j.dump(2) << '\n';
    } else {
        out << "state " << spec.name << ":\n";
        for (std::size_t i = 0; i < spec.branches.size(); ++i) {
            const auto& amp = spec.amplitudes[i];
            out << "  " << std::showpos << std::setprecision(6) << amp.real() << std::noshowpos;
            if (amp.imag() != 0.0) out << (amp.imag() < 0 ? " - " : " + ") << std::fabs(amp.imag()) << "i";
            out << "  |" << describe(spec.branches[i]) << ">\n";
        }
        out << std::setprecision(6);
        out << "total energy difference: " << io::format_number(report.delta_e_total.mev) << " MeV\n";
        out << "predicted collapse time (k=" << io::format_number(report.k) << "): ";
        if (report.predicted_tc)
            out << report.predicted_tc->seconds << " s\n";
        else
            out << "no collapse\n";
        out << "reference order of magnitude: ~1e-4 s\n";
        out << j.dump(2) << '\n';
    }
    if (!a.out.empty()) {
        json params = {{"k", a.k}, {"masses", a.masses}};
        write_with_manifest(a.out, j.dump(2) + "\n", io::make_manifest("kaon", params, constants, std::nullopt));
    }
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Energy-driven collapse laboratory", "collapse-lab"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Monte Carlo ensemble of a two-level system; writes CSV");
    s->add_option("--delta-e", sim.delta_e, "Level splitting (MeV, or dimensionless)")->required();
    s->add_option("--alpha", sim.alpha, "Initial population of level 1")->required();
    s->add_option("--trajectories", sim.trajectories, "Number of trajectories")->required();
    s->add_option("--dt", sim.dt, "Step size (s)")->required();
    s->add_option("--t-max", sim.t_max, "End time (s)")->required();
    s->add_option("--seed", sim.seed, "RNG seed")->required();
    s->add_option("--k", sim.k, "Collapse constant k")->capture_default_str();
    s->add_option("--out", sim.out, "Output CSV path")->required();
    s->add_flag("--dimensionless", sim.dimensionless, "Use hbar = E_p = 1");
    s->add_option("--record-stride", sim.record_stride, "Record every Nth step")->capture_default_str();
    s->add_option("--threads", sim.threads, "Worker threads (0 = all cores)")->capture_default_str();
    s->add_flag("--keep-phase", sim.keep_phase, "Keep the free e^{-iEt/hbar} rotation");
    s->add_option("--collapse-threshold", sim.threshold, "Population that declares an outcome")
        ->capture_default_str();

    PredictArgs pred;
    auto* p = app.add_subcommand("predict", "Collapse time of a two-branch structure file; prints JSON");
    p->add_option("--structure", pred.structure, "Structure JSON file")->required()->check(CLI::ExistingFile);
    p->add_option("--k", pred.k, "Collapse constant k")->capture_default_str();
    p->add_option("--masses", pred.masses, "Mass table JSON (name -> MeV)")->check(CLI::ExistingFile);
    p->add_option("--measured", pred.measured, "Measured timescale (s) for comparison");
    p->add_option("--out", pred.out, "Also write the report here");

    SweepArgs sw;
    auto* w = app.add_subcommand("sweep", "Collapse time over log-spaced energy differences; writes CSV");
    w->add_option("--delta-e-min", sw.min, "Smallest difference (MeV)")->required();
    w->add_option("--delta-e-max", sw.max, "Largest difference (MeV)")->required();
    w->add_option("--points", sw.points, "Number of points")->required();
    w->add_option("--k", sw.k, "Collapse constant k")->capture_default_str();
    w->add_flag("--dimensionless", sw.dimensionless, "Use hbar = E_p = 1");
    w->add_option("--out", sw.out, "Output CSV path")->required();

    KaonArgs ka;
    auto* kc = app.add_subcommand("kaon", "K_L case study");
    kc->add_option("--k", ka.k, "Collapse constant k")->capture_default_str();
    kc->add_option("--masses", ka.masses, "Mass table JSON (needs s and d)")->check(CLI::ExistingFile);
    kc->add_flag("--json", ka.json_only, "Print only the JSON report");
    kc->add_option("--out", ka.out, "Also write the JSON report here");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (s->parsed()) return simulate(sim, out);
        if (p->parsed()) return predict(pred, out);
        if (w->parsed()) return sweep(sw, out);
        return kaon(ka, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const NumericFailure& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kNumeric;
    } catch (const EnsembleFailure& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    }
}

}  // namespace collapse::cli
