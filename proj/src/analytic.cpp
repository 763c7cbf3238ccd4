#include "irsa_aoi/analytic.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/core.h>

namespace irsa_aoi {

namespace {

void require_probability(double p, const char* what)
{
    if (!(p > 0.0 && p <= 1.0))
        throw std::invalid_argument(fmt::format("{} = {} must lie in (0,1]", what, p));
}

void require_population(int n)
{
    if (n < 1)
        throw std::invalid_argument(fmt::format("population n = {} must be >= 1", n));
}

std::int64_t floor_to_int(double x)
{
    return static_cast<std::int64_t>(std::floor(x));
}

}  // namespace

// ---------------------------------------------------------------------------
// Slotted ALOHA

double xi_sa(double rho, int n)
{
    require_probability(rho, "rho");
    require_population(n);
    return rho * pow_complement(rho, n - 1.0);
}

double throughput_sa(double rho, int n)
{
    return n * xi_sa(rho, n);
}

double avg_aoi_sa(double rho, int n)
{
    const double s = throughput_sa(rho, n);
    if (s <= 0.0)
        throw DivergentAgeError(fmt::format("slotted ALOHA throughput is zero (rho = {}, n = {})", rho, n));
    return 0.5 + n / s;
}

double min_avg_aoi_sa(int n)
{
    require_population(n);
    const double p = 1.0 / n;
    return 0.5 + n * pow_complement(p, 1.0 - n);
}

double age_violation_sa(double theta, double rho, int n)
{
    const double xi = xi_sa(rho, n);
    if (!(theta > 1.0))
        return 1.0;
    return pow_complement(xi, std::floor(theta) - 1.0);
}

// ---------------------------------------------------------------------------
// IRSA building blocks

double channel_load(int n, double rho, int m)
{
    require_population(n);
    require_probability(rho, "rho");
    if (m < 1)
        throw std::invalid_argument("channel_load: frame size must be >= 1");
    return n * one_minus_pow_complement(rho, m) / m;
}

double rho_for_load(int n, double load, int m)
{
    require_population(n);
    if (m < 1)
        throw std::invalid_argument("rho_for_load: frame size must be >= 1");
    const double busy = load * m / n;
    if (!(busy > 0.0 && busy <= 1.0))
        throw std::domain_error(fmt::format("load {} is not reachable with n = {}, m = {}", load, n, m));
    if (busy == 1.0)
        return 1.0;
    return -std::expm1(std::log1p(-busy) / m);
}

double pmf_offset(int b, double rho, int m)
{
    require_probability(rho, "rho");
    if (m < 1 || b < 1 || b > m)
        throw std::out_of_range(fmt::format("pmf_offset: b = {} outside [1, {}]", b, m));
    return rho * pow_complement(rho, b - 1.0) / one_minus_pow_complement(rho, m);
}

OffsetPmf::OffsetPmf(std::vector<double> probabilities) : probs_(std::move(probabilities))
{
    if (probs_.empty())
        throw std::invalid_argument("offset PMF needs at least one value");
    for (double p : probs_)
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument(fmt::format("offset PMF value {} outside [0,1]", p));
    tail_.assign(probs_.size() + 1, 0.0);
    for (std::size_t b = probs_.size(); b-- > 0;)
        tail_[b] = tail_[b + 1] + probs_[b];
    if (std::abs(tail_[0] - 1.0) > 1e-10)
        throw std::invalid_argument(fmt::format("offset PMF sums to {}, not 1", tail_[0]));
    for (std::size_t b = 0; b < probs_.size(); ++b)
        mean_offset_ += static_cast<double>(b) * probs_[b];
}

OffsetPmf OffsetPmf::last_activation(double rho, int m)
{
    std::vector<double> p(static_cast<std::size_t>(m));
    for (int b = 1; b <= m; ++b)
        p[b - 1] = pmf_offset(b, rho, m);
    return OffsetPmf(std::move(p));
}

OffsetPmf OffsetPmf::uniform(int m)
{
    if (m < 1)
        throw std::invalid_argument("uniform offset PMF: frame size must be >= 1");
    return OffsetPmf(std::vector<double>(static_cast<std::size_t>(m), 1.0 / m));
}

OffsetPmf OffsetPmf::immediate(int m)
{
    if (m < 1)
        throw std::invalid_argument("immediate offset PMF: frame size must be >= 1");
    std::vector<double> p(static_cast<std::size_t>(m), 0.0);
    p[0] = 1.0;
    return OffsetPmf(std::move(p));
}

double OffsetPmf::operator()(int b) const
{
    if (b < 1 || b > frame_size())
        throw std::out_of_range(fmt::format("offset b = {} outside [1, {}]", b, frame_size()));
    return probs_[static_cast<std::size_t>(b - 1)];
}

double OffsetPmf::tail(int b) const
{
    if (b <= 0)
        return 1.0;
    if (b >= frame_size())
        return 0.0;
    return tail_[static_cast<std::size_t>(b)];
}

double transition_prob(std::int64_t i, std::int64_t j, double xi, const OffsetPmf& offsets)
{
    if (i < 0 || j < 0)
        throw std::invalid_argument("transition_prob: states are non-negative");
    const std::int64_t m = offsets.frame_size();
    if (j < m)
        return xi * offsets(static_cast<int>(j + 1));
    if (j == i + m)
        return 1.0 - xi;
    return 0.0;
}

double stationary_pmf(std::int64_t omega, double xi, const OffsetPmf& offsets)
{
    if (omega < 0)
        return 0.0;
    const auto [alpha, beta] = decompose(omega, offsets.frame_size());
    return xi * pow_complement(xi, static_cast<double>(beta)) * offsets(static_cast<int>(alpha + 1));
}

StationaryAgeDistribution::StationaryAgeDistribution(double xi, std::optional<OffsetPmf> offsets)
    : xi_(xi), offsets_(std::move(offsets))
{
    if (!(xi > 0.0 && xi <= 1.0))
        throw DivergentAgeError(fmt::format("delivery probability {} gives no proper stationary law", xi));
}

StationaryAgeDistribution StationaryAgeDistribution::irsa(double xi, OffsetPmf offsets)
{
    return {xi, std::move(offsets)};
}

StationaryAgeDistribution StationaryAgeDistribution::sa(double xi)
{
    return {xi, std::nullopt};
}

int StationaryAgeDistribution::period() const noexcept
{
    return offsets_ ? offsets_->frame_size() : 1;
}

double StationaryAgeDistribution::pmf(std::int64_t omega) const
{
    if (offsets_)
        return stationary_pmf(omega, xi_, *offsets_);
    return omega < 0 ? 0.0 : xi_ * pow_complement(xi_, static_cast<double>(omega));
}

double StationaryAgeDistribution::tail(std::int64_t t) const
{
    if (t < 0)
        return 1.0;
    if (!offsets_)
        return pow_complement(xi_, t + 1.0);
    // P{Omega >= t+1}: same frame count with a larger slot offset, or more frames
    const auto [alpha, beta] = decompose(t + 1, offsets_->frame_size());
    return xi_ * pow_complement(xi_, static_cast<double>(beta)) * offsets_->tail(static_cast<int>(alpha))
           + pow_complement(xi_, beta + 1.0);
}

double StationaryAgeDistribution::mean() const
{
    const double frames = (1.0 - xi_) / xi_;
    if (!offsets_)
        return frames;
    return offsets_->frame_size() * frames + offsets_->mean_offset();
}

IrsaOperatingPoint operating_point(const SystemConfig& cfg, const PlrModel& plr_model)
{
    validate_config(cfg);
    IrsaOperatingPoint op{cfg};
    op.load = channel_load(cfg.n, cfg.rho, cfg.m);
    op.plr = plr_model.evaluate(op.load, cfg.m, cfg.n);
    op.throughput = op.load * (1.0 - op.plr);
    op.xi = one_minus_pow_complement(cfg.rho, cfg.m) * (1.0 - op.plr);
    return op;
}

namespace {

/// 1/rho - m (1-rho)^m / (1-(1-rho)^m): mean generation-to-frame-start wait plus one.
double generation_wait_term(double rho, int m)
{
    if (rho >= 1.0)
        return 1.0;
    return 1.0 / rho - m * pow_complement(rho, m) / one_minus_pow_complement(rho, m);
}

void require_throughput(const IrsaOperatingPoint& op)
{
    if (!(op.throughput > 0.0) || !(op.xi > 0.0))
        throw DivergentAgeError(fmt::format("IRSA throughput is zero (load {}, PLR {})", op.load, op.plr));
}

}  // namespace

double avg_aoi_irsa(const IrsaOperatingPoint& op)
{
    require_throughput(op);
    const auto& c = op.cfg;
    return c.m / 2.0 + c.n / op.throughput + generation_wait_term(c.rho, c.m);
}

double avg_aoi_irsa(const SystemConfig& cfg, const PlrModel& plr_model)
{
    return avg_aoi_irsa(operating_point(cfg, plr_model));
}

double avg_aoi_irsa_approx(const IrsaOperatingPoint& op)
{
    require_throughput(op);
    return 0.5 + op.cfg.n / op.throughput + op.cfg.m;
}

double avg_aoi_irsa_approx(const SystemConfig& cfg, const PlrModel& plr_model)
{
    return avg_aoi_irsa_approx(operating_point(cfg, plr_model));
}

double age_violation_irsa(double theta, const IrsaOperatingPoint& op)
{
    require_throughput(op);
    const int m = op.cfg.m;
    const double rho = op.cfg.rho;
    // delta'_k = Omega + 2m + 1 > theta  <=>  Omega > floor(theta) - 2m - 1
    const std::int64_t t = floor_to_int(theta) - 2 * static_cast<std::int64_t>(m) - 1;
    if (t < 0)
        return 1.0;
    const auto [alpha, beta] = decompose(t, m);
    const double xi = op.xi;
    // ((1-rho)^(1+alpha) - (1-rho)^m) / (1 - (1-rho)^m)
    const double slot_tail = pow_complement(rho, alpha + 1.0)
                             * one_minus_pow_complement(rho, static_cast<double>(m - 1 - alpha))
                             / one_minus_pow_complement(rho, m);
    return xi * pow_complement(xi, static_cast<double>(beta)) * slot_tail + pow_complement(xi, beta + 1.0);
}

double age_violation_irsa(double theta, const SystemConfig& cfg, const PlrModel& plr_model)
{
    return age_violation_irsa(theta, operating_point(cfg, plr_model));
}

FrameSizeOptimum optimal_frame_size(const SystemConfig& base, const PlrModel& plr_model, int m_min, int m_max)
{
    if (m_min < 1 || m_max < m_min)
        throw std::invalid_argument(fmt::format("frame size range [{}, {}] is empty", m_min, m_max));
    FrameSizeOptimum best{0, std::numeric_limits<double>::infinity()};
    for (int m = m_min; m <= m_max; ++m) {
        SystemConfig cfg = base;
        cfg.m = m;
        if (!config_violations(cfg).empty())
            continue;
        try {
            const double aoi = avg_aoi_irsa(cfg, plr_model);
            if (aoi < best.aoi)
                best = {m, aoi};
        } catch (const DivergentAgeError&) {
        }
    }
    if (best.m == 0)
        throw DivergentAgeError(fmt::format("every frame size in [{}, {}] gives a divergent age", m_min, m_max));
    return best;
}

int max_frame_irsa(double delta_target, double rho)
{
    require_probability(rho, "rho");
    auto m = floor_to_int(2.0 / 3.0 * (delta_target - 1.0 / rho));
    // guard the floor against rounding of the product
    while (m >= 1 && 1.5 * m + 1.0 / rho > delta_target)
        --m;
    while (1.5 * (m + 1) + 1.0 / rho <= delta_target)
        ++m;
    if (m < 1)
        throw InfeasibleTargetError(
            fmt::format("target age {} is below the single-user floor 3/2 + 1/rho = {}", delta_target, 1.5 + 1.0 / rho));
    return static_cast<int>(m);
}

int max_users_sa(double delta_target, double rho)
{
    require_probability(rho, "rho");
    if (delta_target < 0.5 + 1.0 / rho)
        throw InfeasibleTargetError(
            fmt::format("target age {} is below the single-user SA age {}", delta_target, 0.5 + 1.0 / rho));
    if (rho >= 1.0)
        return 1;
    const double bound = 1.0 - std::log(rho * (delta_target - 0.5)) / std::log1p(-rho);
    if (bound > std::numeric_limits<int>::max())
        throw std::overflow_error("max_users_sa: population bound exceeds int range");
    return static_cast<int>(std::floor(bound));
}

int max_users_irsa(double delta_target, double rho, int m, const DegreeDistribution& degrees,
                   const PlrModel& plr_model)
{
    auto aoi_at = [&](int n) {
        return avg_aoi_irsa(SystemConfig{n, m, rho, degrees}, plr_model);
    };
    if (aoi_at(1) > delta_target)
        throw InfeasibleTargetError(
            fmt::format("target age {} is below the single-user IRSA age {} at m = {}", delta_target, aoi_at(1), m));

    constexpr int kMaxPopulation = 1 << 30;
    int lo = 1;  // aoi_at(lo) <= target
    int hi = 2;
    while (aoi_at(hi) <= delta_target) {
        lo = hi;
        if (hi >= kMaxPopulation / 2)
            throw std::overflow_error("max_users_irsa: no population bound below 2^30");
        hi *= 2;
    }
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        if (aoi_at(mid) <= delta_target)
            lo = mid;
        else
            hi = mid;
    }
    if (!(aoi_at(lo) <= delta_target && aoi_at(lo + 1) > delta_target))
        throw std::logic_error("max_users_irsa: age is not monotone in n around the boundary");
    return lo;
}

}  // namespace irsa_aoi
