#include "irsa_aoi/core.hpp"

#include <cmath>
#include <numeric>

#include <fmt/core.h>

namespace irsa_aoi {

namespace {

std::string join_violations(const std::vector<std::string>& violations)
{
    std::string out = "invalid configuration";
    for (const auto& v : violations) {
        out += "; ";
        out += v;
    }
    return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::invalid_argument(join_violations(violations)), violations_(std::move(violations))
{
}

std::vector<std::string> degree_distribution_violations(std::span<const DegreeEntry> entries)
{
    std::vector<std::string> out;
    if (entries.empty()) {
        out.emplace_back("degree distribution is empty");
        return out;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        if (e.degree < 1)
            out.push_back(fmt::format("degree {} is not positive", e.degree));
        if (!(e.probability >= 0.0 && e.probability <= 1.0))
            out.push_back(fmt::format("probability {} of degree {} is outside [0,1]", e.probability, e.degree));
        if (i > 0 && e.degree <= entries[i - 1].degree)
            out.push_back(fmt::format("degrees not strictly increasing at degree {}", e.degree));
        total += e.probability;
    }
    if (std::abs(total - 1.0) > DegreeDistribution::kNormalizationTolerance)
        out.push_back(fmt::format("distribution not normalized (sum = {})", total));
    return out;
}

DegreeDistribution::DegreeDistribution(std::vector<DegreeEntry> entries) : entries_(std::move(entries))
{
    if (auto v = degree_distribution_violations(entries_); !v.empty())
        throw ConfigError(std::move(v));
}

DegreeDistribution DegreeDistribution::regular(int degree)
{
    return DegreeDistribution({DegreeEntry{degree, 1.0}});
}

double DegreeDistribution::mean_degree() const noexcept
{
    return std::accumulate(entries_.begin(), entries_.end(), 0.0,
                           [](double acc, const DegreeEntry& e) { return acc + e.degree * e.probability; });
}

std::vector<std::string> config_violations(const SystemConfig& cfg)
{
    std::vector<std::string> out;
    if (cfg.n < 1)
        out.push_back(fmt::format("population n = {} must be >= 1", cfg.n));
    if (cfg.m < 1)
        out.push_back(fmt::format("frame size m = {} must be >= 1", cfg.m));
    if (!(cfg.rho > 0.0 && cfg.rho <= 1.0))
        out.push_back(fmt::format("activation probability rho = {} must lie in (0,1]", cfg.rho));
    if (!(cfg.slot_duration > 0.0) || !std::isfinite(cfg.slot_duration))
        out.push_back(fmt::format("slot duration {} must be positive", cfg.slot_duration));
    auto dist = degree_distribution_violations(cfg.degrees.entries());
    out.insert(out.end(), dist.begin(), dist.end());
    if (cfg.m >= 1 && cfg.degrees.max_degree() > cfg.m)
        out.push_back(fmt::format("degree exceeds frame size ({} > m = {})", cfg.degrees.max_degree(), cfg.m));
    return out;
}

const SystemConfig& validate_config(const SystemConfig& cfg)
{
    if (auto v = config_violations(cfg); !v.empty())
        throw ConfigError(std::move(v));
    return cfg;
}

std::vector<std::string> traffic_violations(const TrafficProfile& traffic)
{
    std::vector<std::string> out;
    auto in_unit = [](double p) { return p > 0.0 && p <= 1.0; };
    if (const auto* b = std::get_if<BernoulliPerSlot>(&traffic)) {
        if (!in_unit(b->rho))
            out.push_back(fmt::format("traffic rho = {} must lie in (0,1]", b->rho));
    } else {
        const auto& mk = std::get<TwoStateMarkov>(traffic);
        if (!in_unit(mk.lambda))
            out.push_back(fmt::format("traffic lambda = {} must lie in (0,1]", mk.lambda));
        if (!in_unit(mk.sigma))
            out.push_back(fmt::format("traffic sigma = {} must lie in (0,1]", mk.sigma));
    }
    return out;
}

SlotDecomposition decompose(std::int64_t x, std::int64_t m)
{
    if (m < 1)
        throw std::invalid_argument("decompose: frame size must be >= 1");
    if (x < 0)
        throw std::invalid_argument("decompose: index must be non-negative");
    return {x % m, x / m};
}

double pow_complement(double p, double k)
{
    if (k == 0.0)
        return 1.0;
    if (p >= 1.0)
        return 0.0;
    return std::exp(k * std::log1p(-p));
}

double one_minus_pow_complement(double p, double k)
{
    if (k == 0.0)
        return 0.0;
    if (p >= 1.0)
        return 1.0;
    return -std::expm1(k * std::log1p(-p));
}

}  // namespace irsa_aoi
