#include "collapse/structure.hpp"

#include <algorithm>
#include <cmath>

#include "collapse/errors.hpp"

namespace collapse::structure {

namespace {

void collect_leaves(const ParticleNode& node, std::vector<ParticleNode>& out) {
    if (node.elementary()) {
        out.push_back(node);
        return;
    }
    for (const auto& c : node.constituents) collect_leaves(c, out);
}

}  // namespace

void validate(const ParticleNode& node) {
    if (node.name.empty()) throw ValidationError("particle with empty name");
    if (node.mass && (!std::isfinite(node.mass->mev) || node.mass->mev < 0.0))
        throw ValidationError("particle '" + node.name + "': mass must be finite and >= 0");
    if (node.elementary() && !node.mass)
        throw ValidationError("elementary particle '" + node.name + "' has no mass");
    for (const auto& c : node.constituents) validate(c);
}

std::vector<ParticleNode> leaves(const ParticleNode& node) {
    std::vector<ParticleNode> out;
    collect_leaves(node, out);
    return out;
}

Energy total_energy_difference(const ParticleNode& branch_a, const ParticleNode& branch_b) {
    const auto la = leaves(branch_a);
    const auto lb = leaves(branch_b);
    if (la.size() != lb.size())
        throw ValidationError("leaf count mismatch: '" + branch_a.name + "' has " + std::to_string(la.size()) +
                              " leaves, '" + branch_b.name + "' has " + std::to_string(lb.size()) + " leaves");
    Energy total{0.0};
    for (std::size_t i = 0; i < la.size(); ++i) {
        if (!la[i].mass || !lb[i].mass)
            throw ValidationError("leaf without mass: '" + (la[i].mass ? lb[i].name : la[i].name) + "'");
        total += abs(*la[i].mass - *lb[i].mass);
    }
    return total;
}

SuperpositionSpec SuperpositionSpec::make(std::string name, std::vector<ParticleNode> branches,
                                          std::vector<Complex> amplitudes) {
    if (branches.size() < 2) throw ValidationError("superposition needs at least two branches");
    if (amplitudes.size() != branches.size())
        throw ValidationError("superposition: " + std::to_string(branches.size()) + " branches but " +
                              std::to_string(amplitudes.size()) + " amplitudes");
    for (const auto& b : branches) validate(b);
    double norm2 = 0.0;
    for (const auto& a : amplitudes) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
            throw ValidationError("superposition: non-finite amplitude");
        norm2 += std::norm(a);
    }
    if (norm2 == 0.0) throw ValidationError("superposition: all amplitudes are zero");
    if (std::fabs(norm2 - 1.0) > 1e-15)
        for (auto& a : amplitudes) a /= std::sqrt(norm2);
    return {std::move(name), std::move(branches), std::move(amplitudes)};
}

HypothesisReport predict_collapse_time(const SuperpositionSpec& spec, const PhysicalConstants& constants) {
    if (spec.branches.size() != 2)
        throw ValidationError("prediction supports exactly two branches, got " + std::to_string(spec.branches.size()));
    const Energy de = total_energy_difference(spec.branches[0], spec.branches[1]);
    const auto p = analytic::collapse_time(de, constants);
    return HypothesisReport{spec.name, de, p.collapse_time, p.k_used, std::nullopt, std::nullopt};
}

std::vector<HypothesisReport> compare_hypotheses(std::vector<HypothesisReport> reports, Duration measured) {
    if (!std::isfinite(measured.seconds) || measured.seconds <= 0.0)
        throw ValidationError("measured timescale must be > 0");
    for (auto& r : reports) {
        r.measured_timescale = measured;
        r.log10_ratio.reset();
        if (r.predicted_tc) r.log10_ratio = std::log10(r.predicted_tc->seconds / measured.seconds);
    }
    std::stable_sort(reports.begin(), reports.end(), [](const HypothesisReport& a, const HypothesisReport& b) {
        if (a.comparable() != b.comparable()) return a.comparable();
        if (!a.comparable()) return false;
        return std::fabs(*a.log10_ratio) < std::fabs(*b.log10_ratio);
    });
    return reports;
}

MassTable default_quark_masses() { return {{"s", Energy{500.0}}, {"d", Energy{300.0}}}; }

std::optional<Energy> resolve_mass(const MassTable& table, const std::string& name) {
    if (auto it = table.find(name); it != table.end()) return it->second;
    constexpr std::string_view suffix = "bar";
    if (name.size() > suffix.size() && name.ends_with(suffix)) {
        if (auto it = table.find(name.substr(0, name.size() - suffix.size())); it != table.end()) return it->second;
    }
    return std::nullopt;
}

ParticleNode apply_masses(ParticleNode node, const MassTable& table) {
    if (node.elementary()) {
        if (auto m = resolve_mass(table, node.name)) node.mass = m;
        return node;
    }
    for (auto& c : node.constituents) c = apply_masses(std::move(c), table);
    return node;
}

SuperpositionSpec kaon_superposition(const MassTable& table) {
    auto mass = [&](const std::string& name) {
        auto m = resolve_mass(table, name);
        if (!m) throw ValidationError("mass table has no entry for '" + name + "'");
        return m->mev;
    };
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    return SuperpositionSpec::make(
        "K_L",
        {ParticleNode::composite("K0", {ParticleNode::leaf("s", mass("s")), ParticleNode::leaf("dbar", mass("dbar"))}),
         ParticleNode::composite("K0bar",
                                 {ParticleNode::leaf("d", mass("d")), ParticleNode::leaf("sbar", mass("sbar"))})},
        {Complex(inv_sqrt2), Complex(-inv_sqrt2)});
}

HypothesisReport kaon_case_study(const PhysicalConstants& constants, const MassTable& table) {
    return predict_collapse_time(kaon_superposition(table), constants);
}

}  // namespace collapse::structure
