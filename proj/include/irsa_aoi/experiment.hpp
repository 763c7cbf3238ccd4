#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "irsa_aoi/core.hpp"
#include "irsa_aoi/csv.hpp"
#include "irsa_aoi/plr.hpp"
#include "irsa_aoi/sim.hpp"

namespace irsa_aoi {

/// Age threshold, either absolute in slots or a multiple of the frame size
/// ("4m" in a config file).
struct Threshold {
    double value = 0.0;
    bool per_frame = false;

    double slots(int m) const { return per_frame ? value * m : value; }
    std::string label() const;
};

/// "1-lambda" in a sigma grid is stored as nullopt.
using SigmaChoice = std::optional<double>;

struct SweepSpec {
    std::string parameter;  ///< n_rho, rho, n, m, load, lambda or sigma
    std::vector<double> values;
    std::vector<SigmaChoice> sigmas;  ///< lambda sweeps only
};

struct SimulationSettings {
    std::int64_t frames = 10000;
    std::int64_t burn_in = 100;
    std::int64_t slots = 1000000;  ///< SA run length
    std::int64_t sa_burn_in = -1;  ///< < 0: ten mean inter-delivery times
    std::vector<std::uint64_t> seeds{1};
    int replications = 1;
    int threads = 0;
};

struct ValidationSettings {
    double aoi_tolerance = 0.03;
    double sa_aoi_tolerance = 0.02;
    double sigmas = 3.0;
};

/// Dimensioning inputs; times are in the same unit as slot_duration.
struct DesignSettings {
    double target_aoi = 0.0;
    double update_period = 0.0;
    int m = 100;
};

struct ExperimentSpec {
    Protocol protocol = Protocol::irsa;
    SystemConfig system;
    std::optional<TwoStateMarkov> bursty;  ///< set when traffic.model = markov
    PlrModel plr;
    std::optional<SweepSpec> sweep;
    std::vector<Threshold> thresholds;
    SimulationSettings simulation;
    ValidationSettings validation;
    DesignSettings design;
    std::string output_dir = ".";

    TrafficProfile traffic() const;
};

/// Applies "a.b.c=value" to a JSON document. The value is parsed as JSON
/// when possible and kept as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Parses a config document; throws ConfigError listing every problem.
/// Relative table files resolve against `base_dir`.
ExperimentSpec parse_spec(const nlohmann::json& doc, const std::string& base_dir = ".");

nlohmann::json load_json_file(const std::string& path);

/// Invariant check shared by every run_* entry point.
std::vector<std::string> spec_violations(const ExperimentSpec& spec);

/// Closed forms over the sweep grid (or the base point), one row per point.
CsvTable run_analytic(const ExperimentSpec& spec);

struct SimulationResult {
    std::vector<SimMetrics> runs;  ///< in seed / replication order
    SimMetrics pooled;
};

/// Runs every seed x replication at the base point.
SimulationResult run_simulate(const ExperimentSpec& spec);

/// Simulation with the closed form alongside, one row per grid point. A load
/// sweep estimates the PLR curve instead (columns load, plr, ...).
CsvTable run_sweep(const ExperimentSpec& spec);

struct ValidationReport {
    CsvTable table;  ///< point, metric, simulated, analytic, deviation, tolerance, verdict
    int failures = 0;
};

ValidationReport run_validate(const ExperimentSpec& spec);

/// key,value rows: normalized inputs and the three dimensioning results.
CsvTable run_design(const ExperimentSpec& spec);

}  // namespace irsa_aoi
