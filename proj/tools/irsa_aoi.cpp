// Command-line front end: analytic | simulate | sweep | validate | design.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "irsa_aoi/experiment.hpp"

namespace fs = std::filesystem;
using namespace irsa_aoi;
using nlohmann::json;

namespace {

struct Options {
    std::string config;
    std::string out;
    std::vector<std::uint64_t> seeds;
    int replications = 0;
    int threads = -1;
    std::vector<std::string> sets;
    std::string sweep;
    std::vector<std::string> thetas;
    std::int64_t frames = -1;
    std::int64_t burn_in = -1;
    std::int64_t slots = -1;
    bool quiet = false;
};

void add_common(CLI::App* cmd, Options& o)
{
    cmd->add_option("-c,--config", o.config, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("-o,--out", o.out, "output directory (overrides 'output')");
    cmd->add_option("--set", o.sets, "override a config key, dotted path: --set plr.model=constant");
    cmd->add_option("--sweep", o.sweep, "sweep grid, e.g. n_rho=0.2,0.4,0.8");
    cmd->add_option("--theta", o.thetas, "age threshold in slots, or a frame multiple like 4m");
    cmd->add_flag("-q,--quiet", o.quiet, "do not echo tables to stdout");
}

void add_simulation(CLI::App* cmd, Options& o)
{
    cmd->add_option("--seed", o.seeds, "base seed (repeatable)");
    cmd->add_option("--replications", o.replications, "replications per seed")->check(CLI::PositiveNumber);
    cmd->add_option("--threads", o.threads, "concurrent replications (0 = hardware)");
    cmd->add_option("--frames", o.frames, "IRSA frames per run, burn-in included");
    cmd->add_option("--burn-in", o.burn_in, "IRSA frames discarded at the start");
    cmd->add_option("--slots", o.slots, "SA slots per run");
}

json parse_scalar(const std::string& text)
{
    json v = json::parse(text, nullptr, false);
    return v.is_discarded() ? json(text) : v;
}

json build_document(const Options& o)
{
    json doc = o.config.empty() ? json::object() : load_json_file(o.config);
    for (const auto& s : o.sets)
        apply_override(doc, s);
    if (!o.sweep.empty()) {
        const auto eq = o.sweep.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--sweep expects name=v1,v2,...");
        json values = json::array();
        std::stringstream ss(o.sweep.substr(eq + 1));
        for (std::string item; std::getline(ss, item, ',');)
            values.push_back(parse_scalar(item));
        doc["sweep"]["parameter"] = o.sweep.substr(0, eq);
        doc["sweep"]["values"] = values;
    }
    if (!o.thetas.empty()) {
        json th = json::array();
        for (const auto& t : o.thetas)
            th.push_back(parse_scalar(t));
        doc["thresholds"] = th;
    }
    if (!o.seeds.empty())
        doc["simulation"]["seeds"] = o.seeds;
    if (o.replications > 0)
        doc["simulation"]["replications"] = o.replications;
    if (o.threads >= 0)
        doc["simulation"]["threads"] = o.threads;
    if (o.frames >= 0)
        doc["simulation"]["frames"] = o.frames;
    if (o.burn_in >= 0)
        doc["simulation"]["burn_in"] = o.burn_in;
    if (o.slots >= 0)
        doc["simulation"]["slots"] = o.slots;
    if (!o.out.empty())
        doc["output"] = o.out;
    return doc;
}

std::string output_path(const ExperimentSpec& spec, const std::string& file)
{
    fs::create_directories(spec.output_dir);
    return (fs::path(spec.output_dir) / file).string();
}

void emit(const ExperimentSpec& spec, const Options& o, const CsvTable& table, const std::string& file)
{
    const auto path = output_path(spec, file);
    write_csv_file(path, table);
    if (!o.quiet)
        write_csv(std::cout, table);
    std::cerr << "wrote " << path << '\n';
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Age of Information of IRSA and slotted ALOHA: closed forms and simulation"};
    app.require_subcommand(1);
    Options o;
    auto* analytic = app.add_subcommand("analytic", "evaluate the closed forms over a grid");
    auto* simulate = app.add_subcommand("simulate", "simulate the base point");
    auto* sweep = app.add_subcommand("sweep", "simulate every grid point next to the closed form");
    auto* validate = app.add_subcommand("validate", "simulation vs closed form with pass/fail verdicts");
    auto* design = app.add_subcommand("design", "dimensioning for a target average age");
    for (auto* cmd : {analytic, simulate, sweep, validate, design})
        add_common(cmd, o);
    for (auto* cmd : {simulate, sweep, validate})
        add_simulation(cmd, o);

    CLI11_PARSE(app, argc, argv);

    try {
        const json doc = build_document(o);
        const std::string base_dir = o.config.empty() ? "." : fs::path(o.config).parent_path().string();
        const ExperimentSpec spec = parse_spec(doc, base_dir.empty() ? "." : base_dir);

        if (analytic->parsed()) {
            emit(spec, o, run_analytic(spec), "analytic.csv");
        } else if (simulate->parsed()) {
            const auto res = run_simulate(spec);
            {
                std::ofstream runs(output_path(spec, "runs.csv"));
                write_runs_csv(runs, res.runs);
                std::ofstream hist(output_path(spec, "histogram.csv"));
                write_histogram_csv(hist, res.pooled.histogram);
            }
            const auto& p = res.pooled;
            fmt::print("runs {}  measured {}  plr {:.6g}  throughput {:.6g}  avg_aoi {:.6g}\n", res.runs.size(),
                       p.measured, p.empirical_plr, p.empirical_throughput, p.time_avg_aoi);
            for (const auto& th : spec.thresholds)
                fmt::print("violation@{} {:.6g}\n", th.label(),
                           empirical_age_violation(p, th.slots(spec.protocol == Protocol::sa ? 1 : spec.system.m)));
            std::cerr << "wrote " << output_path(spec, "runs.csv") << ", " << output_path(spec, "histogram.csv")
                      << '\n';
        } else if (sweep->parsed()) {
            emit(spec, o, run_sweep(spec), "sweep.csv");
        } else if (validate->parsed()) {
            const auto rep = run_validate(spec);
            emit(spec, o, rep.table, "validation.csv");
            fmt::print("{} check(s) failed\n", rep.failures);
            return rep.failures ? 1 : 0;
        } else if (design->parsed()) {
            emit(spec, o, run_design(spec), "design.csv");
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error:\n";
        for (const auto& v : e.violations())
            std::cerr << "  - " << v << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
