// JSON manifests and CSV writers. Every output file starts with a single
// "# {json}" manifest line; floats are written with 17 significant digits.
#pragma once

#include "tikhochaos/chaoscan.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>

namespace tikhochaos {

using json = nlohmann::ordered_json;

void to_json(json& j, const SystemSpec& spec);
void from_json(const json& j, SystemSpec& spec);

void to_json(json& j, const IntegratorConfig& cfg);
/// Missing keys keep the values already in `cfg`.
void from_json(const json& j, IntegratorConfig& cfg);

void to_json(json& j, const LyapunovEstimate& est);

/// "%.17g", with inf/nan spelled "inf", "-inf", "nan".
std::string format_double(double value);

void write_manifest(std::ostream& os, const json& manifest);
/// Parses a "# {json}" first line; nullopt when the stream has no manifest.
std::optional<json> read_manifest(std::istream& is);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const json& manifest);
void write_energy_csv(std::ostream& os, const EnergyTrace& trace, const json& manifest);
void write_poincare_csv(std::ostream& os, const PoincareSection& section, const json& manifest);
void write_bifurcation_csv(std::ostream& os, const BifurcationDiagram& diagram, const json& manifest);
void write_lambda_map_csv(std::ostream& os, const LambdaMap& map, const json& manifest);

// ---------------------------------------------------------------------------
// Plot-ready data: whitespace-separated columns plus a JSON sidecar
// describing axes and labels. Nothing is rendered.
// ---------------------------------------------------------------------------

struct PlotSidecar {
    std::string kind;
    std::vector<std::string> columns;
    std::string xlabel;
    std::string ylabel;
    std::string title;
};

void to_json(json& j, const PlotSidecar& s);

PlotSidecar write_plotdata(std::ostream& os, const Trajectory& traj);
PlotSidecar write_plotdata(std::ostream& os, const PoincareSection& section);
PlotSidecar write_plotdata(std::ostream& os, const BifurcationDiagram& diagram);
PlotSidecar write_plotdata(std::ostream& os, const LambdaMap& map);
PlotSidecar write_plotdata(std::ostream& os, const EnergyTrace& trace);

}  // namespace tikhochaos
