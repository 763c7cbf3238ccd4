#include "irsa_aoi/bursty.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/core.h>

namespace irsa_aoi {

namespace {

void require_rates(double lambda, double sigma)
{
    auto v = traffic_violations(TwoStateMarkov{lambda, sigma});
    if (!v.empty())
        throw ConfigError(std::move(v));
}

}  // namespace

ActivityShares stationary_activity(double lambda, double sigma)
{
    require_rates(lambda, sigma);
    return {lambda / (lambda + sigma), sigma / (lambda + sigma)};
}

double bursty_load(int n, int m, double lambda, double sigma)
{
    if (n < 1 || m < 1)
        throw std::invalid_argument("bursty_load: n and m must be positive");
    return n * stationary_activity(lambda, sigma).active / m;
}

BurstyStateDistribution bursty_state_distribution(double lambda, double sigma, double plr, double epsilon)
{
    require_rates(lambda, sigma);
    if (!(plr >= 0.0 && plr < 1.0))
        throw std::invalid_argument(fmt::format("bursty chain needs plr in [0,1), got {}", plr));
    if (!(epsilon > 0.0))
        throw std::invalid_argument("bursty chain: epsilon must be positive");

    // M = [[a, b], [c, d]] on (silent, active)
    const double a = 1.0 - lambda, b = plr * sigma, c = lambda, d = plr * (1.0 - sigma);

    BurstyStateDistribution out;
    const double tr = a + d, det = a * d - b * c;
    out.spectral_radius = 0.5 * tr + std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    if (!(out.spectral_radius < 1.0))
        throw std::logic_error("bursty chain matrix has spectral radius >= 1");

    // column sums of M^2
    const double c2 = std::max(a * a + b * c + c * a + d * c, a * b + b * d + c * b + d * d);
    const double tail_factor = (1.0 + c2) / (1.0 - c2);
    const double mean_factor = 1.0 + 4.0 * c2 / ((1.0 - c2) * (1.0 - c2)) + c2 / (1.0 - c2);

    const double scale = lambda * (1.0 - plr) / (lambda + sigma);
    BurstyLevel level{sigma * scale, (1.0 - sigma) * scale};
    double kept = 0.0;
    for (;;) {
        out.levels.push_back(level);
        kept += level.total();
        const double mass = level.total();
        const double bound = mass * tail_factor;
        if (bound < epsilon || mass == 0.0) {
            const double l = out.max_level();
            out.tail_mass_bound = bound;
            out.tail_mean_bound = mass * (l * tail_factor + mean_factor);
            break;
        }
        level = {a * level.silent + b * level.active, c * level.silent + d * level.active};
    }
    out.residual = 1.0 - kept;
    return out;
}

BurstyAverageAge avg_aoi_bursty(const SystemConfig& cfg, double lambda, double sigma, const PlrModel& plr_model,
                                double epsilon, const std::optional<OffsetPmf>& offsets)
{
    validate_config(cfg);
    if (offsets && offsets->frame_size() != cfg.m)
        throw std::invalid_argument("avg_aoi_bursty: offset PMF length differs from m");
    BurstyAverageAge out;
    out.load = bursty_load(cfg.n, cfg.m, lambda, sigma);
    out.plr = plr_model.evaluate(out.load, cfg.m, cfg.n);
    if (!(out.plr < 1.0))
        throw DivergentAgeError(fmt::format("bursty traffic delivers nothing (lambda = {}, PLR = 1)", lambda));
    out.distribution = bursty_state_distribution(lambda, sigma, out.plr, epsilon);

    double level_mean = 0.0;
    const auto& levels = out.distribution.levels;
    for (std::size_t l = 0; l < levels.size(); ++l)
        level_mean += static_cast<double>(l) * levels[l].total();
    out.value = 1.0 + 1.5 * cfg.m + cfg.m * level_mean + (offsets ? offsets->mean_offset() : 0.0);
    out.error_bound = cfg.m * out.distribution.tail_mean_bound;
    return out;
}

double age_violation_bursty(double theta, int m, const BurstyStateDistribution& dist)
{
    if (m < 1)
        throw std::invalid_argument("age_violation_bursty: m must be positive");
    // 2m + 1 + m l > theta  <=>  l > (floor(theta) - 2m - 1) / m
    const double t = std::floor(theta) - 2.0 * m - 1.0;
    if (t < 0.0)
        return 1.0;
    const auto first = static_cast<std::size_t>(std::floor(t / m)) + 1;
    // mass beyond the truncation is counted as exceeding theta
    double tail = std::max(dist.residual, 0.0);
    for (std::size_t l = first; l < dist.levels.size(); ++l)
        tail += dist.levels[l].total();
    return std::clamp(tail, 0.0, 1.0);
}

}  // namespace irsa_aoi
