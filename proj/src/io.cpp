#include "collapse/io.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "collapse/errors.hpp"
#include "collapse/version.hpp"

namespace collapse::io {

namespace {

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
    throw ValidationError(path + ": " + what);
}

json parse_json(std::string_view text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string(what) + ": " + e.what());
    }
}

double number_field(const json& j, const std::string& path) {
    if (!j.is_number()) field_error(path, "expected a number");
    return j.get<double>();
}

structure::ParticleNode parse_node(const json& j, const std::string& path) {
    if (!j.is_object()) field_error(path, "expected an object");
    for (const auto& [key, _] : j.items())
        if (key != "name" && key != "mass_mev" && key != "constituents") field_error(path + "." + key, "unknown field");

    structure::ParticleNode node;
    const auto name = j.find("name");
    if (name == j.end() || !name->is_string() || name->get<std::string>().empty())
        field_error(path + ".name", "required non-empty string");
    node.name = name->get<std::string>();

    if (const auto m = j.find("mass_mev"); m != j.end()) {
        const double v = number_field(*m, path + ".mass_mev");
        if (v < 0.0) field_error(path + ".mass_mev", "must be >= 0");
        node.mass = Energy{v};
    }
    if (const auto c = j.find("constituents"); c != j.end()) {
        if (!c->is_array()) field_error(path + ".constituents", "expected an array");
        for (std::size_t i = 0; i < c->size(); ++i)
            node.constituents.push_back(parse_node((*c)[i], path + ".constituents[" + std::to_string(i) + "]"));
    }
    return node;
}

void require_leaf_masses(const structure::ParticleNode& node, const std::string& path) {
    if (node.elementary()) {
        if (!node.mass) field_error(path + ".mass_mev", "required for elementary particle '" + node.name + "'");
        return;
    }
    for (std::size_t i = 0; i < node.constituents.size(); ++i)
        require_leaf_masses(node.constituents[i], path + ".constituents[" + std::to_string(i) + "]");
}

}  // namespace

std::string format_number(double v) {
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) throw std::runtime_error("format_number: conversion failed");
    return std::string(buf.data(), end);
}

structure::SuperpositionSpec parse_structure(std::string_view text, const structure::MassTable* masses) {
    const json j = parse_json(text, "structure file");
    if (!j.is_object()) field_error("$", "expected an object");
    for (const auto& [key, _] : j.items())
        if (key != "name" && key != "amplitudes" && key != "branches") field_error("$." + key, "unknown field");

    const auto name = j.find("name");
    if (name == j.end() || !name->is_string()) field_error("$.name", "required string");

    const auto branches = j.find("branches");
    if (branches == j.end() || !branches->is_array()) field_error("$.branches", "required array");
    std::vector<structure::ParticleNode> nodes;
    for (std::size_t i = 0; i < branches->size(); ++i) {
        const std::string path = "$.branches[" + std::to_string(i) + "]";
        auto node = parse_node((*branches)[i], path);
        if (masses) node = structure::apply_masses(std::move(node), *masses);
        require_leaf_masses(node, path);
        nodes.push_back(std::move(node));
    }

    const auto amps = j.find("amplitudes");
    if (amps == j.end() || !amps->is_array()) field_error("$.amplitudes", "required array of [re, im] pairs");
    std::vector<Complex> amplitudes;
    for (std::size_t i = 0; i < amps->size(); ++i) {
        const std::string path = "$.amplitudes[" + std::to_string(i) + "]";
        const json& a = (*amps)[i];
        if (!a.is_array() || a.size() != 2) field_error(path, "expected [re, im]");
        amplitudes.emplace_back(number_field(a[0], path + "[0]"), number_field(a[1], path + "[1]"));
    }
    return structure::SuperpositionSpec::make(name->get<std::string>(), std::move(nodes), std::move(amplitudes));
}

structure::SuperpositionSpec load_structure(const std::filesystem::path& path, const structure::MassTable* masses) {
    return parse_structure(read_file(path), masses);
}

json to_json(const structure::ParticleNode& node) {
    json j = {{"name", node.name}};
    if (node.mass) j["mass_mev"] = node.mass->mev;
    if (!node.elementary()) {
        json parts = json::array();
        for (const auto& c : node.constituents) parts.push_back(to_json(c));
        j["constituents"] = std::move(parts);
    }
    return j;
}

json to_json(const structure::SuperpositionSpec& spec) {
    json amps = json::array();
    for (const auto& a : spec.amplitudes) amps.push_back({a.real(), a.imag()});
    json branches = json::array();
    for (const auto& b : spec.branches) branches.push_back(to_json(b));
    return {{"name", spec.name}, {"amplitudes", std::move(amps)}, {"branches", std::move(branches)}};
}

structure::MassTable parse_mass_table(std::string_view text) {
    const json j = parse_json(text, "mass table");
    if (!j.is_object()) field_error("$", "expected an object of name -> MeV");
    structure::MassTable table;
    for (const auto& [key, value] : j.items()) {
        const double v = number_field(value, "$." + key);
        if (v < 0.0) field_error("$." + key, "mass must be >= 0");
        table[key] = Energy{v};
    }
    return table;
}

structure::MassTable load_mass_table(const std::filesystem::path& path) { return parse_mass_table(read_file(path)); }

json to_json(const structure::HypothesisReport& r) {
    json j = {{"hypothesis_name", r.hypothesis_name}, {"delta_e_total_mev", r.delta_e_total.mev}};
    if (r.predicted_tc)
        j["predicted_tc_seconds"] = r.predicted_tc->seconds;
    else
        j["predicted_tc_seconds"] = "no_collapse";
    j["k"] = r.k;
    if (r.measured_timescale) j["measured_seconds"] = r.measured_timescale->seconds;
    if (r.log10_ratio) j["log10_ratio"] = *r.log10_ratio;
    return j;
}

json to_json(const PhysicalConstants& c) {
    return {{"hbar_mev_s", c.hbar()}, {"planck_energy_mev", c.planck_energy()}, {"k", c.k()}};
}

void write_simulation_csv(std::ostream& out, const sde::EnsembleStats& stats, const sde::SdeConfig& config) {
    if (stats.dimension != 2) throw ValidationError("simulation CSV requires a two-level ensemble");
    out << kSimulationHeader << '\n';
    for (std::size_t r = 0; r < stats.times.size(); ++r) {
        const auto& rho = stats.mean_density[r];
        const auto oracle =
            analytic::density_matrix_mean(config.state0, stats.times[r], config.constants, stats.keep_phase);
        out << format_number(stats.times[r].seconds) << ',' << format_number(rho(0, 0).real()) << ','
            << format_number(rho(0, 1).real()) << ',' << format_number(rho(0, 1).imag()) << ','
            << format_number(rho(1, 1).real()) << ',' << format_number(stats.mean_energy[r]) << ','
            << format_number(stats.mean_energy_variance[r]) << ',' << stats.decided_counts[r][0] << ','
            << stats.decided_counts[r][1] << ',' << format_number(oracle(0, 1).real()) << '\n';
    }
}

void write_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::filesystem::path manifest_path(const std::filesystem::path& out) {
    return std::filesystem::path(out.string() + ".manifest.json");
}

json make_manifest(std::string_view command, json parameters, const PhysicalConstants& constants,
                   std::optional<std::uint64_t> seed, json metadata) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    std::array<char, 32> stamp{};
    std::strftime(stamp.data(), stamp.size(), "%Y-%m-%dT%H:%M:%SZ", &utc);
    json m = {{"command", command},
              {"parameters", std::move(parameters)},
              {"constants", to_json(constants)},
              {"code_version", kVersion},
              {"timestamp", std::string(stamp.data())},
              {"metadata", std::move(metadata)}};
    m["seed"] = seed ? json(*seed) : json(nullptr);
    return m;
}

}  // namespace collapse::io
