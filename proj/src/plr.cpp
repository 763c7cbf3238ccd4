#include "irsa_aoi/plr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/core.h>

#include "irsa_aoi/core.hpp"

namespace irsa_aoi {

namespace {

double log_binomial(int m, int k)
{
    return std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0);
}

double clamp_unit(double p)
{
    if (std::isnan(p))
        throw std::domain_error("PLR model produced NaN");
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace

std::vector<std::string> error_floor_violations(const ErrorFloorConstants& consts)
{
    std::vector<std::string> out;
    if (consts.nu.size() != consts.mu.size() || consts.nu.size() != consts.c.size())
        out.emplace_back("error-floor vectors nu, mu, c must have equal length");
    if (consts.nu.empty())
        out.emplace_back("error-floor vectors are empty");
    auto positive = [](const std::vector<int>& v) {
        return std::all_of(v.begin(), v.end(), [](int x) { return x > 0; });
    };
    if (!positive(consts.nu) || !positive(consts.mu) || !positive(consts.c))
        out.emplace_back("error-floor constants must be positive");
    if (consts.degree < 1)
        out.emplace_back("error-floor degree must be positive");
    return out;
}

std::vector<std::string> waterfall_violations(const WaterfallConstants& consts)
{
    std::vector<std::string> out;
    if (!(consts.gamma > 0 && consts.alpha0 > 0 && consts.beta0 > 0 && consts.g_star > 0))
        out.emplace_back("waterfall constants must be positive");
    if (!(consts.g_star < 1.0))
        out.emplace_back("waterfall threshold G* must lie in (0,1)");
    return out;
}

double q_function(double x)
{
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

double phi(int s_index, double load, int m, const ErrorFloorConstants& consts)
{
    if (s_index < 1 || static_cast<std::size_t>(s_index) > consts.nu.size())
        throw std::out_of_range(fmt::format("phi: index {} outside [1, {}]", s_index, consts.nu.size()));
    if (load < 0.0)
        throw std::invalid_argument("phi: channel load must be non-negative");
    const int nu = consts.nu[s_index - 1];
    const double mg = m * load;
    double sum = 0.0;
    for (int k = 0; k < nu; ++k) {
        double falling = 1.0;  // (nu-1)!/k!
        for (int j = k + 1; j < nu; ++j)
            falling *= j;
        const double sign = ((nu - 1 + k) % 2 == 0) ? 1.0 : -1.0;
        sum += sign * std::pow(mg, k) * falling;
    }
    return sum;
}

double plr_error_floor(double load, int m, const ErrorFloorConstants& consts)
{
    if (auto v = error_floor_violations(consts); !v.empty())
        throw ConfigError(std::move(v));
    if (load < 0.0)
        throw std::invalid_argument("plr_error_floor: channel load must be non-negative");
    const int mu_max = *std::max_element(consts.mu.begin(), consts.mu.end());
    if (m < std::max(mu_max, consts.degree))
        throw std::invalid_argument(
            fmt::format("plr_error_floor: frame size {} too small for binomial C(m, {})", m,
                        std::max(mu_max, consts.degree)));

    const double log_frame_patterns = log_binomial(m, consts.degree);
    double total = 0.0;
    for (std::size_t s = 0; s < consts.nu.size(); ++s) {
        const int nu = consts.nu[s];
        const double log_magnitude = std::log(static_cast<double>(nu) * consts.c[s]) - std::lgamma(nu + 1.0)
                                     + log_binomial(m, consts.mu[s]) - nu * log_frame_patterns;
        total += phi(static_cast<int>(s) + 1, load, m, consts) * std::exp(log_magnitude);
    }
    return total;
}

double plr_waterfall(double load, int m, int n, const WaterfallConstants& consts)
{
    if (auto v = waterfall_violations(consts); !v.empty())
        throw ConfigError(std::move(v));
    if (load < 0.0)
        throw std::invalid_argument("plr_waterfall: channel load must be non-negative");
    if (m < 1 || n < 1)
        throw std::invalid_argument("plr_waterfall: m and n must be positive");
    const double busy_fraction = m * load / n;
    if (busy_fraction > 1.0)
        throw std::domain_error(fmt::format("plr_waterfall: m*G/n = {} exceeds 1", busy_fraction));
    const double shifted_threshold = consts.g_star - consts.beta0 * std::pow(static_cast<double>(m), -2.0 / 3.0);
    const double spread = std::sqrt(consts.alpha0 * consts.alpha0 + load * (1.0 - busy_fraction));
    return consts.gamma * q_function(std::sqrt(static_cast<double>(m)) * (shifted_threshold - load) / spread);
}

double plr_combined(double load, int m, int n, const ErrorFloorConstants& ef, const WaterfallConstants& wf)
{
    return clamp_unit(plr_error_floor(load, m, ef) + plr_waterfall(load, m, n, wf));
}

double EmpiricalPlrTable::at(double load) const
{
    if (loads.empty() || loads.size() != plrs.size())
        throw std::invalid_argument("empirical PLR table needs equally sized, non-empty columns");
    if (load <= loads.front())
        return plrs.front();
    if (load >= loads.back())
        return plrs.back();
    const auto hi = static_cast<std::size_t>(std::upper_bound(loads.begin(), loads.end(), load) - loads.begin());
    const std::size_t lo = hi - 1;
    const double t = (load - loads[lo]) / (loads[hi] - loads[lo]);
    if (interpolation == Interpolation::log_linear && plrs[lo] > 0.0 && plrs[hi] > 0.0)
        return std::exp(std::log(plrs[lo]) + t * (std::log(plrs[hi]) - std::log(plrs[lo])));
    return plrs[lo] + t * (plrs[hi] - plrs[lo]);
}

PlrModel::PlrModel(Variant v) : variant_(std::move(v))
{
    std::vector<std::string> problems;
    if (const auto* c = std::get_if<CombinedApprox>(&variant_)) {
        problems = error_floor_violations(c->error_floor);
        auto wf = waterfall_violations(c->waterfall);
        problems.insert(problems.end(), wf.begin(), wf.end());
    } else if (const auto* t = std::get_if<EmpiricalPlrTable>(&variant_)) {
        if (t->loads.empty() || t->loads.size() != t->plrs.size())
            problems.emplace_back("empirical PLR table needs equally sized, non-empty columns");
        for (std::size_t i = 1; i < t->loads.size(); ++i)
            if (!(t->loads[i] > t->loads[i - 1]))
                problems.emplace_back("empirical PLR table loads must be strictly increasing");
    } else if (const auto* k = std::get_if<Constant>(&variant_)) {
        if (!(k->p >= 0.0 && k->p <= 1.0))
            problems.push_back(fmt::format("constant PLR {} outside [0,1]", k->p));
    } else if (!std::get<Custom>(variant_)) {
        problems.emplace_back("custom PLR model is empty");
    }
    if (!problems.empty())
        throw ConfigError(std::move(problems));
}

double PlrModel::evaluate(double load, int m, int n) const
{
    return std::visit(
        [&](const auto& model) -> double {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, CombinedApprox>)
                return plr_combined(load, m, n, model.error_floor, model.waterfall);
            else if constexpr (std::is_same_v<T, EmpiricalPlrTable>)
                return clamp_unit(model.at(load));
            else if constexpr (std::is_same_v<T, Constant>)
                return clamp_unit(model.p);
            else
                return clamp_unit(model(load, m, n));
        },
        variant_);
}

std::string PlrModel::name() const
{
    switch (variant_.index()) {
    case 0: return "combined";
    case 1: return "table";
    case 2: return "constant";
    default: return "custom";
    }
}

}  // namespace irsa_aoi
