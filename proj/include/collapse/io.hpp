#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "collapse/analytic.hpp"
#include "collapse/sde.hpp"
#include "collapse/structure.hpp"

namespace collapse::io {

using nlohmann::json;

/// Shortest decimal string that parses back to the same double.
std::string format_number(double v);

/// Structure file:
///   {"name": str, "amplitudes": [[re, im], ...], "branches": [node, ...]}
///   node = {"name": str, "mass_mev": number, "constituents": [node, ...]}
/// Leaf masses may be omitted when `masses` resolves them; table entries win
/// over file values. Errors name the line/column or the offending field path.
structure::SuperpositionSpec parse_structure(std::string_view text, const structure::MassTable* masses = nullptr);
structure::SuperpositionSpec load_structure(const std::filesystem::path& path,
                                            const structure::MassTable* masses = nullptr);
json to_json(const structure::SuperpositionSpec& spec);
json to_json(const structure::ParticleNode& node);

/// Flat object name -> MeV.
structure::MassTable parse_mass_table(std::string_view text);
structure::MassTable load_mass_table(const std::filesystem::path& path);

/// {hypothesis_name, delta_e_total_mev, predicted_tc_seconds | "no_collapse", k, [measured_seconds, log10_ratio]}
json to_json(const structure::HypothesisReport& report);

json to_json(const PhysicalConstants& constants);

/// Header of the simulation CSV.
inline constexpr std::string_view kSimulationHeader =
    "t,rho11,re_rho12,im_rho12,rho22,mean_energy,energy_variance,decided_1,decided_2,analytic_rho12";

/// One row per recorded time; analytic_rho12 is Re of the closed-form mean coherence.
void write_simulation_csv(std::ostream& out, const sde::EnsembleStats& stats, const sde::SdeConfig& config);

/// Writes `text` to `path`, throwing std::runtime_error on I/O failure.
void write_file(const std::filesystem::path& path, std::string_view text);
std::string read_file(const std::filesystem::path& path);

/// Sidecar path `<out>.manifest.json`.
std::filesystem::path manifest_path(const std::filesystem::path& out);

/// Reproduction record for an output file.
json make_manifest(std::string_view command, json parameters, const PhysicalConstants& constants,
                   std::optional<std::uint64_t> seed, json metadata = json::object());

}  // namespace collapse::io
