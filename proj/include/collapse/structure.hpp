#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "collapse/analytic.hpp"
#include "collapse/state.hpp"
#include "collapse/units.hpp"

namespace collapse::structure {

/// A particle and, for composites, its constituents. Leaves carry the rest
/// masses used as level energies; a composite's own mass is informational.
struct ParticleNode {
    std::string name;
    std::optional<Energy> mass;
    std::vector<ParticleNode> constituents;

    bool elementary() const { return constituents.empty(); }
    bool operator==(const ParticleNode&) const = default;

    static ParticleNode leaf(std::string name, double mass_mev) { return {std::move(name), Energy{mass_mev}, {}}; }
    static ParticleNode composite(std::string name, std::vector<ParticleNode> parts,
                                  std::optional<Energy> mass = std::nullopt) {
        return {std::move(name), mass, std::move(parts)};
    }
};

/// Throws ValidationError for empty names, negative or non-finite masses, or leaves without a mass.
void validate(const ParticleNode& node);

/// Elementary descendants in depth-first document order; a leaf yields itself.
std::vector<ParticleNode> leaves(const ParticleNode& node);

/// Sum over position-paired leaves of |m_a - m_b|. Throws ValidationError on a leaf-count mismatch.
Energy total_energy_difference(const ParticleNode& branch_a, const ParticleNode& branch_b);

struct SuperpositionSpec {
    std::string name;
    std::vector<ParticleNode> branches;
    std::vector<Complex> amplitudes;

    /// Normalizes the amplitudes and validates every branch.
    static SuperpositionSpec make(std::string name, std::vector<ParticleNode> branches,
                                  std::vector<Complex> amplitudes);
};

struct HypothesisReport {
    std::string hypothesis_name;
    Energy delta_e_total;
    std::optional<Duration> predicted_tc;  ///< empty: no collapse
    double k = 1.0;
    std::optional<Duration> measured_timescale;
    std::optional<double> log10_ratio;  ///< log10(predicted / measured), when both are finite

    bool comparable() const { return log10_ratio.has_value(); }
};

/// Two-branch prediction: total energy difference, then t_c = k hbar E_p / dE^2.
/// The amplitudes play no role.
HypothesisReport predict_collapse_time(const SuperpositionSpec& spec, const PhysicalConstants& constants);

/// Attaches log10(predicted / measured) and sorts by |log10_ratio|. Stable, so
/// incomparable (no-collapse) entries keep their relative order at the end.
std::vector<HypothesisReport> compare_hypotheses(std::vector<HypothesisReport> reports, Duration measured);

using MassTable = std::map<std::string, Energy>;

/// s: 500 MeV, d: 300 MeV, chosen so 2 |m_s - m_d| = 400 MeV.
MassTable default_quark_masses();

/// Looks up `name`, falling back to the base name for a trailing "bar".
std::optional<Energy> resolve_mass(const MassTable& table, const std::string& name);

/// Replaces leaf masses with table entries where the name resolves.
ParticleNode apply_masses(ParticleNode node, const MassTable& table);

/// |K_L> = (|s dbar> - |d sbar>) / sqrt(2) built from the table.
SuperpositionSpec kaon_superposition(const MassTable& table);

/// Predicted collapse time of the K_L superposition.
HypothesisReport kaon_case_study(const PhysicalConstants& constants, const MassTable& table = default_quark_masses());

}  // namespace collapse::structure
