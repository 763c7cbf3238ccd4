#include "irsa_aoi/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <stdexcept>

#include <fmt/core.h>

#include "irsa_aoi/analytic.hpp"
#include "irsa_aoi/bursty.hpp"

namespace irsa_aoi {

using nlohmann::json;

std::string Threshold::label() const
{
    return per_frame ? format_number(value) + "m" : format_number(value);
}

TrafficProfile ExperimentSpec::traffic() const
{
    if (bursty)
        return *bursty;
    return BernoulliPerSlot{system.rho};
}

// ---------------------------------------------------------------------------
// config document

void apply_override(json& doc, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument(fmt::format("override '{}' is not key=value", assignment));
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);

    std::string pointer;
    std::size_t begin = 0;
    for (;;) {
        const auto dot = key.find('.', begin);
        const std::string part = key.substr(begin, dot == std::string::npos ? std::string::npos : dot - begin);
        if (part.empty())
            throw std::invalid_argument(fmt::format("override key '{}' has an empty component", key));
        pointer += '/' + part;
        if (dot == std::string::npos)
            break;
        begin = dot + 1;
    }
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded())
        value = text;
    doc[json::json_pointer(pointer)] = std::move(value);
}

json load_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error(fmt::format("cannot open config file {}", path));
    try {
        return json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(fmt::format("{}: {}", path, e.what()));
    }
}

namespace {

class Reader {
public:
    explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

    template <class T>
    void get(const json& obj, const char* key, T& out, const std::string& where)
    {
        if (!obj.contains(key))
            return;
        try {
            out = obj.at(key).get<T>();
        } catch (const json::exception&) {
            errors_.push_back(fmt::format("{}{}: wrong type ({})", where, key, obj.at(key).dump()));
        }
    }

    void unknown_keys(const json& obj, std::initializer_list<const char*> known, const std::string& where)
    {
        for (const auto& [k, v] : obj.items()) {
            (void)v;
            if (std::none_of(known.begin(), known.end(), [&](const char* x) { return k == x; }))
                errors_.push_back(fmt::format("unknown key '{}{}'", where, k));
        }
    }

    void error(std::string msg) { errors_.push_back(std::move(msg)); }

private:
    std::vector<std::string>& errors_;
};

std::optional<Threshold> parse_threshold(const json& v)
{
    if (v.is_number())
        return Threshold{v.get<double>(), false};
    if (!v.is_string())
        return std::nullopt;
    std::string s = v.get<std::string>();
    bool per_frame = false;
    if (!s.empty() && s.back() == 'm') {
        per_frame = true;
        s.pop_back();
    }
    try {
        std::size_t used = 0;
        const double x = std::stod(s, &used);
        if (used != s.size())
            return std::nullopt;
        return Threshold{x, per_frame};
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

PlrModel parse_plr(const json& obj, const std::string& base_dir, Reader& rd)
{
    rd.unknown_keys(obj, {"model", "error_floor", "waterfall", "p", "points", "file", "interpolation"}, "plr.");
    std::string model = "combined";
    rd.get(obj, "model", model, "plr.");
    try {
        if (model == "combined") {
            ErrorFloorConstants ef;
            WaterfallConstants wf;
            if (obj.contains("error_floor")) {
                const auto& e = obj.at("error_floor");
                rd.unknown_keys(e, {"nu", "mu", "c", "degree"}, "plr.error_floor.");
                rd.get(e, "nu", ef.nu, "plr.error_floor.");
                rd.get(e, "mu", ef.mu, "plr.error_floor.");
                rd.get(e, "c", ef.c, "plr.error_floor.");
                rd.get(e, "degree", ef.degree, "plr.error_floor.");
            }
            if (obj.contains("waterfall")) {
                const auto& w = obj.at("waterfall");
                rd.unknown_keys(w, {"gamma", "g_star", "alpha0", "beta0"}, "plr.waterfall.");
                rd.get(w, "gamma", wf.gamma, "plr.waterfall.");
                rd.get(w, "g_star", wf.g_star, "plr.waterfall.");
                rd.get(w, "alpha0", wf.alpha0, "plr.waterfall.");
                rd.get(w, "beta0", wf.beta0, "plr.waterfall.");
            }
            return PlrModel::combined(ef, wf);
        }
        if (model == "constant") {
            double p = 0.0;
            if (!obj.contains("p"))
                rd.error("plr.p is required for the constant model");
            rd.get(obj, "p", p, "plr.");
            return PlrModel::constant(p);
        }
        if (model == "table") {
            EmpiricalPlrTable t;
            std::string interp = "linear";
            rd.get(obj, "interpolation", interp, "plr.");
            if (interp == "log_linear")
                t.interpolation = EmpiricalPlrTable::Interpolation::log_linear;
            else if (interp != "linear")
                rd.error(fmt::format("plr.interpolation '{}' is not linear or log_linear", interp));
            if (obj.contains("points")) {
                std::vector<std::pair<double, double>> pts;
                rd.get(obj, "points", pts, "plr.");
                for (const auto& [g, p] : pts) {
                    t.loads.push_back(g);
                    t.plrs.push_back(p);
                }
            } else if (obj.contains("file")) {
                std::filesystem::path path = obj.at("file").get<std::string>();
                if (path.is_relative())
                    path = std::filesystem::path(base_dir) / path;
                const auto csv = read_csv_file(path.string());
                for (std::size_t r = 0; r < csv.rows.size(); ++r) {
                    t.loads.push_back(csv.number(r, "load"));
                    t.plrs.push_back(csv.number(r, "plr"));
                }
            } else {
                rd.error("plr.points or plr.file is required for the table model");
            }
            return PlrModel::table(std::move(t));
        }
        rd.error(fmt::format("plr.model '{}' is not combined, constant or table", model));
    } catch (const ConfigError& e) {
        for (const auto& v : e.violations())
            rd.error("plr: " + v);
    } catch (const std::exception& e) {
        rd.error(fmt::format("plr: {}", e.what()));
    }
    return PlrModel{};
}

bool strictly_monotone(const std::vector<double>& v)
{
    auto inc = std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
    auto dec = std::adjacent_find(v.begin(), v.end(), std::less_equal<>()) == v.end();
    return inc || dec;
}

const std::set<std::string> kSweepParameters{"n_rho", "rho", "n", "m", "load", "lambda", "sigma"};

}  // namespace

ExperimentSpec parse_spec(const json& doc, const std::string& base_dir)
{
    std::vector<std::string> errors;
    Reader rd(errors);
    ExperimentSpec spec;
    if (!doc.is_object())
        throw ConfigError({"config document must be a JSON object"});
    rd.unknown_keys(doc,
                    {"protocol", "n", "m", "rho", "n_rho", "slot_duration", "degree_distribution", "traffic", "plr",
                     "sweep", "thresholds", "simulation", "validation", "design", "output"},
                    "");

    std::string protocol = "irsa";
    rd.get(doc, "protocol", protocol, "");
    if (protocol == "sa")
        spec.protocol = Protocol::sa;
    else if (protocol != "irsa")
        rd.error(fmt::format("protocol '{}' is not irsa or sa", protocol));

    auto& sys = spec.system;
    sys.n = 4000;
    sys.m = 500;
    sys.degrees = DegreeDistribution::regular(3);
    rd.get(doc, "n", sys.n, "");
    rd.get(doc, "m", sys.m, "");
    rd.get(doc, "slot_duration", sys.slot_duration, "");
    if (doc.contains("rho") && doc.contains("n_rho"))
        rd.error("give either rho or n_rho, not both");
    if (doc.contains("n_rho")) {
        double n_rho = 0.0;
        rd.get(doc, "n_rho", n_rho, "");
        sys.rho = sys.n > 0 ? n_rho / sys.n : 0.0;
    } else {
        sys.rho = 0.4 / std::max(sys.n, 1);
        rd.get(doc, "rho", sys.rho, "");
    }
    if (doc.contains("degree_distribution")) {
        std::vector<std::pair<int, double>> pairs;
        rd.get(doc, "degree_distribution", pairs, "");
        std::vector<DegreeEntry> entries;
        for (const auto& [l, p] : pairs)
            entries.push_back({l, p});
        try {
            sys.degrees = DegreeDistribution(std::move(entries));
        } catch (const ConfigError& e) {
            errors.insert(errors.end(), e.violations().begin(), e.violations().end());
        }
    }

    if (doc.contains("traffic")) {
        const auto& t = doc.at("traffic");
        rd.unknown_keys(t, {"model", "lambda", "sigma"}, "traffic.");
        std::string model = "bernoulli";
        rd.get(t, "model", model, "traffic.");
        if (model == "markov") {
            TwoStateMarkov mk;
            if (!t.contains("lambda") || !t.contains("sigma"))
                rd.error("traffic.lambda and traffic.sigma are required for the markov model");
            rd.get(t, "lambda", mk.lambda, "traffic.");
            rd.get(t, "sigma", mk.sigma, "traffic.");
            spec.bursty = mk;
        } else if (model != "bernoulli") {
            rd.error(fmt::format("traffic.model '{}' is not bernoulli or markov", model));
        }
    }

    spec.plr = parse_plr(doc.value("plr", json::object()), base_dir, rd);

    if (doc.contains("sweep")) {
        const auto& s = doc.at("sweep");
        rd.unknown_keys(s, {"parameter", "values", "sigmas"}, "sweep.");
        SweepSpec sw;
        rd.get(s, "parameter", sw.parameter, "sweep.");
        rd.get(s, "values", sw.values, "sweep.");
        if (s.contains("sigmas")) {
            for (const auto& v : s.at("sigmas")) {
                if (v.is_number())
                    sw.sigmas.emplace_back(v.get<double>());
                else if (v == "1-lambda")
                    sw.sigmas.emplace_back(std::nullopt);
                else
                    rd.error(fmt::format("sweep.sigmas entry {} is not a number or \"1-lambda\"", v.dump()));
            }
        }
        spec.sweep = std::move(sw);
    }

    if (doc.contains("thresholds")) {
        for (const auto& v : doc.at("thresholds")) {
            if (auto th = parse_threshold(v))
                spec.thresholds.push_back(*th);
            else
                rd.error(fmt::format("threshold {} is not a number or '<k>m'", v.dump()));
        }
    }

    if (doc.contains("simulation")) {
        const auto& s = doc.at("simulation");
        rd.unknown_keys(s, {"frames", "burn_in", "slots", "sa_burn_in", "seeds", "replications", "threads"},
                        "simulation.");
        auto& sim = spec.simulation;
        rd.get(s, "frames", sim.frames, "simulation.");
        rd.get(s, "burn_in", sim.burn_in, "simulation.");
        rd.get(s, "slots", sim.slots, "simulation.");
        rd.get(s, "sa_burn_in", sim.sa_burn_in, "simulation.");
        rd.get(s, "seeds", sim.seeds, "simulation.");
        rd.get(s, "replications", sim.replications, "simulation.");
        rd.get(s, "threads", sim.threads, "simulation.");
    }
    if (doc.contains("validation")) {
        const auto& v = doc.at("validation");
        rd.unknown_keys(v, {"aoi_tolerance", "sa_aoi_tolerance", "sigmas"}, "validation.");
        rd.get(v, "aoi_tolerance", spec.validation.aoi_tolerance, "validation.");
        rd.get(v, "sa_aoi_tolerance", spec.validation.sa_aoi_tolerance, "validation.");
        rd.get(v, "sigmas", spec.validation.sigmas, "validation.");
    }
    if (doc.contains("design")) {
        const auto& d = doc.at("design");
        rd.unknown_keys(d, {"target_aoi", "update_period", "m"}, "design.");
        rd.get(d, "target_aoi", spec.design.target_aoi, "design.");
        rd.get(d, "update_period", spec.design.update_period, "design.");
        rd.get(d, "m", spec.design.m, "design.");
    }
    rd.get(doc, "output", spec.output_dir, "");

    auto more = spec_violations(spec);
    errors.insert(errors.end(), more.begin(), more.end());
    if (!errors.empty())
        throw ConfigError(std::move(errors));
    return spec;
}

std::vector<std::string> spec_violations(const ExperimentSpec& spec)
{
    auto out = config_violations(spec.system);
    if (spec.bursty) {
        auto t = traffic_violations(*spec.bursty);
        out.insert(out.end(), t.begin(), t.end());
        if (spec.protocol == Protocol::sa)
            out.emplace_back("markov traffic is only modeled for irsa");
    }
    if (spec.sweep) {
        const auto& sw = *spec.sweep;
        if (!kSweepParameters.count(sw.parameter))
            out.push_back(fmt::format("sweep parameter '{}' is not one of n_rho, rho, n, m, load, lambda, sigma",
                                      sw.parameter));
        if (sw.values.empty())
            out.emplace_back("sweep grid is empty");
        else if (!strictly_monotone(sw.values))
            out.emplace_back("sweep grid must be strictly monotone");
        if ((sw.parameter == "n" || sw.parameter == "m")
            && std::any_of(sw.values.begin(), sw.values.end(), [](double v) { return v != std::floor(v) || v < 1; }))
            out.push_back(fmt::format("sweep over {} needs positive integers", sw.parameter));
        if (!sw.sigmas.empty() && sw.parameter != "lambda")
            out.emplace_back("sweep.sigmas only applies to a lambda sweep");
        if (((sw.parameter == "lambda" && sw.sigmas.empty()) || sw.parameter == "sigma") && !spec.bursty)
            out.push_back(fmt::format("a {} sweep needs markov traffic or a sigma list", sw.parameter));
    }
    for (const auto& th : spec.thresholds)
        if (!(th.value >= 0.0))
            out.push_back(fmt::format("threshold {} is negative", th.label()));
    const auto& sim = spec.simulation;
    if (!(sim.frames > sim.burn_in && sim.burn_in >= 0))
        out.push_back(fmt::format("simulation needs frames > burn_in >= 0 (got {}, {})", sim.frames, sim.burn_in));
    if (!(sim.slots > std::max<std::int64_t>(sim.sa_burn_in, 0)))
        out.push_back(fmt::format("simulation needs slots > sa_burn_in (got {}, {})", sim.slots, sim.sa_burn_in));
    if (sim.seeds.empty())
        out.emplace_back("simulation.seeds is empty");
    if (sim.replications < 1)
        out.emplace_back("simulation.replications must be >= 1");
    if (!(spec.validation.aoi_tolerance > 0 && spec.validation.sa_aoi_tolerance > 0 && spec.validation.sigmas > 0))
        out.emplace_back("validation tolerances must be positive");
    return out;
}

// ---------------------------------------------------------------------------
// grid handling

namespace {

struct GridPoint {
    std::size_t index = 0;
    double value = std::nan("");
    SigmaChoice sigma;
    bool has_sigma = false;
};

std::vector<GridPoint> grid_of(const ExperimentSpec& spec)
{
    std::vector<GridPoint> out;
    if (!spec.sweep) {
        out.push_back({});
        return out;
    }
    const auto& sw = *spec.sweep;
    for (double v : sw.values) {
        if (sw.sigmas.empty()) {
            out.push_back({out.size(), v, std::nullopt, false});
        } else {
            for (const auto& s : sw.sigmas)
                out.push_back({out.size(), v, s, true});
        }
    }
    return out;
}

/// The spec with one grid point applied.
ExperimentSpec at_point(const ExperimentSpec& spec, const GridPoint& p)
{
    ExperimentSpec s = spec;
    s.sweep.reset();
    if (!spec.sweep)
        return s;
    const std::string& name = spec.sweep->parameter;
    auto& sys = s.system;
    if (name == "n_rho")
        sys.rho = p.value / sys.n;
    else if (name == "rho")
        sys.rho = p.value;
    else if (name == "n")
        sys.n = static_cast<int>(p.value);
    else if (name == "m")
        sys.m = static_cast<int>(p.value);
    else if (name == "load")
        sys.rho = rho_for_load(sys.n, p.value, sys.m);
    else if (name == "lambda") {
        TwoStateMarkov mk = spec.bursty.value_or(TwoStateMarkov{});
        mk.lambda = p.value;
        if (p.has_sigma)
            mk.sigma = p.sigma ? *p.sigma : 1.0 - p.value;
        s.bursty = mk;
    } else if (name == "sigma") {
        s.bursty->sigma = p.value;
    }
    return s;
}

std::string parameter_column(const ExperimentSpec& spec)
{
    return spec.sweep ? spec.sweep->parameter : "point";
}

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string status_of(const std::exception& e)
{
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    return msg;
}

/// Row builder keyed by column name, so optional columns stay aligned.
class RowBuilder {
public:
    explicit RowBuilder(const std::vector<std::string>& header) : header_(header), cells_(header.size(), "nan") {}

    void set(const std::string& column, double x) { set_text(column, format_number(x)); }
    void set_text(const std::string& column, std::string text)
    {
        const auto it = std::find(header_.begin(), header_.end(), column);
        if (it == header_.end())
            throw std::logic_error("unknown column " + column);
        cells_[static_cast<std::size_t>(it - header_.begin())] = std::move(text);
    }
    std::vector<std::string> take() { return std::move(cells_); }

private:
    const std::vector<std::string>& header_;
    std::vector<std::string> cells_;
};

std::int64_t sa_burn_in(const ExperimentSpec& spec)
{
    if (spec.simulation.sa_burn_in >= 0)
        return spec.simulation.sa_burn_in;
    const double xi = xi_sa(spec.system.rho, spec.system.n);
    const double wanted = xi > 0 ? 10.0 / xi : 0.0;
    return static_cast<std::int64_t>(std::min(wanted, 0.5 * static_cast<double>(spec.simulation.slots)));
}

std::vector<std::string> base_columns(const ExperimentSpec& spec, const std::vector<GridPoint>& grid)
{
    std::vector<std::string> h{parameter_column(spec)};
    if (!grid.empty() && grid.front().has_sigma)
        h.emplace_back("sigma");
    return h;
}

void fill_base(RowBuilder& row, const ExperimentSpec& spec, const GridPoint& p)
{
    row.set(parameter_column(spec), spec.sweep ? p.value : static_cast<double>(p.index));
    if (p.has_sigma)
        row.set_text("sigma", p.sigma ? format_number(*p.sigma) : "1-lambda");
}

}  // namespace

// ---------------------------------------------------------------------------
// analytic

CsvTable run_analytic(const ExperimentSpec& spec)
{
    if (auto v = spec_violations(spec); !v.empty())
        throw ConfigError(std::move(v));
    const auto grid = grid_of(spec);
    const bool bursty = spec.bursty || (spec.sweep && spec.sweep->parameter == "lambda" && !spec.sweep->sigmas.empty());
    const bool wall_clock = spec.system.slot_duration != 1.0;

    CsvTable t;
    t.header = base_columns(spec, grid);
    if (bursty) {
        for (const char* c : {"lambda_value", "sigma_value", "p_active", "n", "m", "G", "P_l", "aoi_bursty", "error_bound",
                              "levels"})
            t.header.emplace_back(c);
        for (const auto& th : spec.thresholds)
            t.header.push_back("zeta_bursty_ext@" + th.label());
        if (wall_clock)
            t.header.emplace_back("aoi_bursty_time");
    } else {
        for (const char* c : {"n", "m", "rho", "G", "P_l", "S", "xi", "aoi_irsa", "aoi_irsa_approx", "aoi_sa",
                              "ratio"})
            t.header.emplace_back(c);
        for (const auto& th : spec.thresholds)
            t.header.push_back("zeta_irsa@" + th.label());
        for (const auto& th : spec.thresholds)
            t.header.push_back("zeta_sa@" + th.label());
        if (wall_clock) {
            t.header.emplace_back("aoi_irsa_time");
            t.header.emplace_back("aoi_sa_time");
        }
    }
    t.header.emplace_back("status");

    for (const auto& p : grid) {
        RowBuilder row(t.header);
        fill_base(row, spec, p);
        std::string status = "ok";
        try {
            const ExperimentSpec s = at_point(spec, p);
            const auto& sys = s.system;
            row.set("n", sys.n);
            row.set("m", sys.m);
            if (bursty) {
                const auto mk = *s.bursty;
                row.set("lambda_value", mk.lambda);
                row.set("sigma_value", mk.sigma);
                row.set("p_active", stationary_activity(mk.lambda, mk.sigma).active);
                const auto r = avg_aoi_bursty(sys, mk.lambda, mk.sigma, s.plr);
                row.set("G", r.load);
                row.set("P_l", r.plr);
                row.set("aoi_bursty", r.value);
                row.set("error_bound", r.error_bound);
                row.set("levels", r.distribution.max_level() + 1);
                for (const auto& th : s.thresholds)
                    row.set("zeta_bursty_ext@" + th.label(),
                            age_violation_bursty(th.slots(sys.m), sys.m, r.distribution));
                if (wall_clock)
                    row.set("aoi_bursty_time", r.value * sys.slot_duration);
            } else {
                validate_config(sys);
                row.set("rho", sys.rho);
                // SA columns do not depend on the PLR model; fill them first
                try {
                    const double sa = avg_aoi_sa(sys.rho, sys.n);
                    row.set("aoi_sa", sa);
                    if (wall_clock)
                        row.set("aoi_sa_time", sa * sys.slot_duration);
                } catch (const DivergentAgeError& e) {
                    status = status_of(e);
                }
                for (const auto& th : s.thresholds)
                    row.set("zeta_sa@" + th.label(), age_violation_sa(th.slots(sys.m), sys.rho, sys.n));
                const auto op = operating_point(sys, s.plr);
                row.set("G", op.load);
                row.set("P_l", op.plr);
                row.set("S", op.throughput);
                row.set("xi", op.xi);
                const double irsa = avg_aoi_irsa(op);
                row.set("aoi_irsa", irsa);
                row.set("aoi_irsa_approx", avg_aoi_irsa_approx(op));
                if (wall_clock)
                    row.set("aoi_irsa_time", irsa * sys.slot_duration);
                if (status == "ok")
                    row.set("ratio", irsa / avg_aoi_sa(sys.rho, sys.n));
                for (const auto& th : s.thresholds)
                    row.set("zeta_irsa@" + th.label(), age_violation_irsa(th.slots(sys.m), op));
            }
        } catch (const std::exception& e) {
            status = status_of(e);
        }
        row.set_text("status", status);
        t.rows.push_back(row.take());
    }
    return t;
}

// ---------------------------------------------------------------------------
// simulation

SimulationResult run_simulate(const ExperimentSpec& spec)
{
    if (auto v = spec_violations(spec); !v.empty())
        throw ConfigError(std::move(v));
    const auto& sim = spec.simulation;
    SimulationResult out;
    for (std::uint64_t seed : sim.seeds) {
        std::vector<SimMetrics> runs;
        if (spec.protocol == Protocol::sa)
            runs = simulate_sa_replications(spec.system, sim.slots, sa_burn_in(spec), seed, sim.replications,
                                            sim.threads);
        else
            runs = simulate_irsa_replications(spec.system, spec.traffic(), sim.frames, sim.burn_in, seed,
                                              sim.replications, sim.threads);
        out.runs.insert(out.runs.end(), runs.begin(), runs.end());
    }
    out.pooled = pool_metrics(out.runs);
    return out;
}

namespace {

/// Closed-form counterparts of a simulated point, evaluated at PLR model `plr`.
struct Theory {
    double aoi = kNan;
    std::vector<double> zeta;     // per threshold
    std::vector<double> sigma;    // standard error of the empirical zeta, per threshold
};

Theory theory_for(const ExperimentSpec& s, const PlrModel& plr, const SimMetrics& pooled)
{
    Theory th;
    const auto& sys = s.system;
    const double samples = static_cast<double>(pooled.age_samples);
    if (s.protocol == Protocol::sa) {
        th.aoi = avg_aoi_sa(sys.rho, sys.n);
        const auto dist = StationaryAgeDistribution::sa(xi_sa(sys.rho, sys.n));
        for (const auto& t : s.thresholds) {
            const double theta = t.slots(1);
            th.zeta.push_back(age_violation_sa(theta, sys.rho, sys.n));
            // end-of-slot age Psi + 2 > theta
            const auto tail_at = static_cast<std::int64_t>(std::floor(theta)) - 2;
            th.sigma.push_back(std::sqrt(age_violation_asymptotic_variance(dist, tail_at) / samples));
        }
        return th;
    }
    if (s.bursty) {
        const auto r = avg_aoi_bursty(sys, s.bursty->lambda, s.bursty->sigma, plr);
        th.aoi = r.value;
        for (const auto& t : s.thresholds) {
            th.zeta.push_back(age_violation_bursty(t.slots(sys.m), sys.m, r.distribution));
            th.sigma.push_back(kNan);
        }
        return th;
    }
    const auto op = operating_point(sys, plr);
    th.aoi = avg_aoi_irsa(op);
    const auto dist = StationaryAgeDistribution::irsa(op.xi, OffsetPmf::last_activation(sys.rho, sys.m));
    for (const auto& t : s.thresholds) {
        const double theta = t.slots(sys.m);
        th.zeta.push_back(age_violation_irsa(theta, op));
        const auto tail_at = static_cast<std::int64_t>(std::floor(theta)) - 2 * sys.m - 1;
        th.sigma.push_back(std::sqrt(age_violation_asymptotic_variance(dist, tail_at) / samples));
    }
    return th;
}

CsvTable plr_sweep(const ExperimentSpec& spec)
{
    const auto grid = grid_of(spec);
    CsvTable t;
    t.header = {"load", "plr", "plr_model", "transmitted", "decoded", "frames", "n", "m", "status"};
    for (const auto& p : grid) {
        RowBuilder row(t.header);
        row.set("load", p.value);
        row.set("n", spec.system.n);
        row.set("m", spec.system.m);
        std::string status = "ok";
        try {
            const auto est = estimate_plr(spec.system.m, spec.system.degrees, p.value, spec.system.n,
                                          spec.simulation.frames, replication_seed(spec.simulation.seeds.front(), p.index));
            row.set("plr", est.plr());
            row.set("transmitted", static_cast<double>(est.transmitted));
            row.set("decoded", static_cast<double>(est.decoded));
            row.set("frames", static_cast<double>(est.frames));
            row.set("plr_model", spec.plr.evaluate(p.value, spec.system.m, spec.system.n));
        } catch (const std::exception& e) {
            status = status_of(e);
        }
        row.set_text("status", status);
        t.rows.push_back(row.take());
    }
    return t;
}

}  // namespace

CsvTable run_sweep(const ExperimentSpec& spec)
{
    if (auto v = spec_violations(spec); !v.empty())
        throw ConfigError(std::move(v));
    if (spec.sweep && spec.sweep->parameter == "load" && spec.protocol == Protocol::irsa && !spec.bursty)
        return plr_sweep(spec);

    const auto grid = grid_of(spec);
    CsvTable t;
    t.header = base_columns(spec, grid);
    for (const char* c : {"n", "m", "rho", "lambda_value", "sigma_value", "plr_sim", "throughput_sim", "aoi_sim",
                          "aoi_theory_empirical_plr", "aoi_theory_model", "age_samples"})
        t.header.emplace_back(c);
    for (const auto& th : spec.thresholds) {
        t.header.push_back("zeta_sim@" + th.label());
        t.header.push_back("zeta_theory@" + th.label());
        t.header.push_back("zeta_stderr@" + th.label());
    }
    t.header.emplace_back("status");

    for (const auto& p : grid) {
        RowBuilder row(t.header);
        fill_base(row, spec, p);
        std::string status = "ok";
        try {
            const ExperimentSpec s = at_point(spec, p);
            row.set("n", s.system.n);
            row.set("m", s.protocol == Protocol::sa ? 1 : s.system.m);
            row.set("rho", s.system.rho);
            if (s.bursty) {
                row.set("lambda_value", s.bursty->lambda);
                row.set("sigma_value", s.bursty->sigma);
            }
            const auto res = run_simulate(s);
            const auto& pooled = res.pooled;
            row.set("plr_sim", pooled.empirical_plr);
            row.set("throughput_sim", pooled.empirical_throughput);
            row.set("aoi_sim", pooled.time_avg_aoi);
            row.set("age_samples", static_cast<double>(pooled.age_samples));
            for (const auto& th : s.thresholds)
                row.set("zeta_sim@" + th.label(), empirical_age_violation(pooled, th.slots(s.system.m)));
            const auto emp = theory_for(s, PlrModel::constant(pooled.empirical_plr), pooled);
            row.set("aoi_theory_empirical_plr", emp.aoi);
            for (std::size_t i = 0; i < s.thresholds.size(); ++i) {
                row.set("zeta_theory@" + s.thresholds[i].label(), emp.zeta[i]);
                row.set("zeta_stderr@" + s.thresholds[i].label(), emp.sigma[i]);
            }
            row.set("aoi_theory_model", theory_for(s, s.plr, pooled).aoi);
        } catch (const std::exception& e) {
            status = status_of(e);
        }
        row.set_text("status", status);
        t.rows.push_back(row.take());
    }
    return t;
}

// ---------------------------------------------------------------------------
// validation

ValidationReport run_validate(const ExperimentSpec& spec)
{
    if (auto v = spec_violations(spec); !v.empty())
        throw ConfigError(std::move(v));
    ValidationReport rep;
    auto& t = rep.table;
    t.header = {"point", "parameter", "value", "metric", "simulated", "analytic", "deviation", "tolerance", "verdict"};
    const auto grid = grid_of(spec);
    const std::string param = parameter_column(spec);

    for (const auto& p : grid) {
        const ExperimentSpec s = at_point(spec, p);
        const auto res = run_simulate(s);
        const auto& pooled = res.pooled;
        const std::string value = spec.sweep ? format_number(p.value) : "";

        auto add = [&](const std::string& metric, double sim, double ana, double dev, double tol) {
            std::string verdict = "INFO";
            if (!std::isnan(tol)) {
                verdict = dev <= tol ? "PASS" : "FAIL";
                if (verdict == "FAIL")
                    ++rep.failures;
            }
            t.rows.push_back({std::to_string(p.index), param, value, metric, format_number(sim), format_number(ana),
                              format_number(dev), format_number(tol), verdict});
        };

        const double aoi_tol = s.protocol == Protocol::sa ? s.validation.sa_aoi_tolerance : s.validation.aoi_tolerance;
        std::vector<std::pair<std::string, PlrModel>> routes;
        if (s.protocol == Protocol::sa)
            routes.emplace_back("", PlrModel::constant(0.0));
        else {
            routes.emplace_back("[empirical_plr]", PlrModel::constant(pooled.empirical_plr));
            routes.emplace_back("[" + s.plr.name() + "]", s.plr);
            const double load = s.bursty ? bursty_load(s.system.n, s.system.m, s.bursty->lambda, s.bursty->sigma)
                                         : channel_load(s.system.n, s.system.rho, s.system.m);
            add("plr[" + s.plr.name() + "]", pooled.empirical_plr, s.plr.evaluate(load, s.system.m, s.system.n),
                std::abs(pooled.empirical_plr - s.plr.evaluate(load, s.system.m, s.system.n)), kNan);
        }
        for (const auto& [suffix, model] : routes) {
            Theory th;
            try {
                th = theory_for(s, model, pooled);
            } catch (const DivergentAgeError&) {
                th.aoi = std::numeric_limits<double>::infinity();
                th.zeta.assign(s.thresholds.size(), kNan);
                th.sigma.assign(s.thresholds.size(), kNan);
            }
            add("avg_aoi" + suffix, pooled.time_avg_aoi, th.aoi, std::abs(pooled.time_avg_aoi / th.aoi - 1.0), aoi_tol);
            for (std::size_t i = 0; i < s.thresholds.size(); ++i) {
                const auto& thr = s.thresholds[i];
                const double sim = empirical_age_violation(pooled, thr.slots(s.protocol == Protocol::sa ? 1 : s.system.m));
                const double diff = std::abs(sim - th.zeta[i]);
                const std::string metric = "violation@" + thr.label() + suffix;
                if (std::isnan(th.sigma[i])) {
                    // no variance model (bursty extension): report only
                    add(metric, sim, th.zeta[i], diff, kNan);
                } else {
                    const double dev = th.sigma[i] > 0 ? diff / th.sigma[i] : (diff == 0.0 ? 0.0 : kNan);
                    add(metric, sim, th.zeta[i], std::isnan(dev) ? std::numeric_limits<double>::infinity() : dev,
                        s.validation.sigmas);
                }
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// design

CsvTable run_design(const ExperimentSpec& spec)
{
    const auto& d = spec.design;
    const double ts = spec.system.slot_duration;
    if (!(d.update_period > 0.0 && d.target_aoi > 0.0))
        throw ConfigError({"design.target_aoi and design.update_period must be positive"});
    if (d.update_period < ts)
        throw ConfigError({"design.update_period must be at least one slot"});
    const double rho = ts / d.update_period;
    const double target = d.target_aoi / ts;

    CsvTable t;
    t.header = {"key", "value"};
    auto put = [&](const std::string& k, double v) { t.rows.push_back({k, format_number(v)}); };
    put("slot_duration", ts);
    put("rho", rho);
    put("target_aoi_slots", target);
    put("sa_single_user_floor_slots", 0.5 + 1.0 / rho);
    put("irsa_single_user_floor_slots", 1.5 * d.m + 1.0 / rho);

    const int n_sa = max_users_sa(target, rho);
    put("max_users_sa", n_sa);
    put("aoi_sa_at_max_time", avg_aoi_sa(rho, n_sa) * ts);
    put("max_frame_irsa", max_frame_irsa(target, rho));
    put("irsa_frame_size", d.m);
    const int n_irsa = max_users_irsa(target, rho, d.m, spec.system.degrees, spec.plr);
    put("max_users_irsa", n_irsa);
    put("aoi_irsa_at_max_time", avg_aoi_irsa(SystemConfig{n_irsa, d.m, rho, spec.system.degrees}, spec.plr) * ts);
    put("irsa_to_sa_users", static_cast<double>(n_irsa) / n_sa);
    return t;
}

}  // namespace irsa_aoi
