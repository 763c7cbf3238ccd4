#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "irsa_aoi/core.hpp"
#include "irsa_aoi/plr.hpp"

namespace irsa_aoi {

// ---------------------------------------------------------------------------
// Slotted ALOHA

/// Per-slot delivery probability of one node: rho (1-rho)^(n-1).
double xi_sa(double rho, int n);

/// Aggregate SA throughput n * xi_sa.
double throughput_sa(double rho, int n);

/// 1/2 + n/S_sa, in slots.
double avg_aoi_sa(double rho, int n);

/// SA average age at rho = 1/n: 1/2 + n (1 - 1/n)^(1-n).
double min_avg_aoi_sa(int n);

/// P{age at the end of a slot > theta} = (1 - xi_sa)^(floor(theta) - 1) for
/// theta > 1, else 1. The age process is sampled at slot boundaries, so a
/// non-integer theta behaves as floor(theta).
double age_violation_sa(double theta, double rho, int n);

// ---------------------------------------------------------------------------
// IRSA

/// Average users accessing the channel per slot, n (1 - (1-rho)^m) / m.
double channel_load(int n, double rho, int m);

/// Inverse of channel_load in rho; requires 0 < load*m/n < 1.
double rho_for_load(int n, double load, int m);

/// P{B = b}: the last activation in a frame happened b slots before its end.
double pmf_offset(int b, double rho, int m);

/// Offset PMF p_B(b), b = 1..m, between an update's generation and the start
/// of the frame carrying it.
class OffsetPmf {
public:
    /// Explicit values for b = 1..m; must sum to 1 within 1e-12.
    explicit OffsetPmf(std::vector<double> probabilities);

    /// Bernoulli activation per slot, last update kept.
    static OffsetPmf last_activation(double rho, int m);
    /// Generation instant uniform over the previous frame.
    static OffsetPmf uniform(int m);
    /// Update generated right before the frame start (B = 1).
    static OffsetPmf immediate(int m);

    int frame_size() const noexcept { return static_cast<int>(probs_.size()); }
    double operator()(int b) const;
    /// P{B > b}, b in [0, m].
    double tail(int b) const;
    /// E[B - 1].
    double mean_offset() const noexcept { return mean_offset_; }

private:
    std::vector<double> probs_;
    std::vector<double> tail_;  // tail_[b] = P{B > b}
    double mean_offset_ = 0.0;
};

/// One-step transition probability of the frame-start age-offset chain.
double transition_prob(std::int64_t i, std::int64_t j, double xi, const OffsetPmf& offsets);

/// Stationary probability that the frame-start age is m + 1 + omega.
double stationary_pmf(std::int64_t omega, double xi, const OffsetPmf& offsets);

/// Stationary law of the age offset at frame starts (IRSA) or slot starts (SA).
class StationaryAgeDistribution {
public:
    static StationaryAgeDistribution irsa(double xi, OffsetPmf offsets);
    static StationaryAgeDistribution sa(double xi_sa);

    double pmf(std::int64_t omega) const;
    /// P{Omega > t}; 1 for t < 0.
    double tail(std::int64_t t) const;
    double mean() const;
    double xi() const noexcept { return xi_; }
    /// Frame size (1 for SA).
    int period() const noexcept;

private:
    StationaryAgeDistribution(double xi, std::optional<OffsetPmf> offsets);

    double xi_;
    std::optional<OffsetPmf> offsets_;
};

struct IrsaOperatingPoint {
    SystemConfig cfg;
    double load = 0.0;
    double plr = 0.0;
    double throughput = 0.0;
    double xi = 0.0;
};

/// Evaluates load, PLR, throughput and per-frame delivery probability.
IrsaOperatingPoint operating_point(const SystemConfig& cfg, const PlrModel& plr_model);

/// m/2 + n/S + (1/rho - m(1-rho)^m / (1-(1-rho)^m)). Throws DivergentAgeError when S = 0.
double avg_aoi_irsa(const IrsaOperatingPoint& op);
double avg_aoi_irsa(const SystemConfig& cfg, const PlrModel& plr_model);

/// Small-rho form 1/2 + n/S + m.
double avg_aoi_irsa_approx(const IrsaOperatingPoint& op);
double avg_aoi_irsa_approx(const SystemConfig& cfg, const PlrModel& plr_model);

/// P{age at the end of a frame > theta}. 1 for theta <= 2m.
double age_violation_irsa(double theta, const IrsaOperatingPoint& op);
double age_violation_irsa(double theta, const SystemConfig& cfg, const PlrModel& plr_model);

struct FrameSizeOptimum {
    int m = 0;
    double aoi = 0.0;
};

/// Exhaustive argmin of avg_aoi_irsa over m in [m_min, m_max]; ties go to the
/// smaller m. `base.m` is ignored.
FrameSizeOptimum optimal_frame_size(const SystemConfig& base, const PlrModel& plr_model, int m_min, int m_max);

/// Largest m with 3m/2 + 1/rho <= delta_target (single user, no loss).
int max_frame_irsa(double delta_target, double rho);

/// Largest n with 1/2 + n/S_sa <= delta_target.
int max_users_sa(double delta_target, double rho);

/// Largest n with avg_aoi_irsa <= delta_target at fixed (m, rho). Assumes the
/// age is non-decreasing in n: the bracket doubles from n = 1, bisection
/// narrows it, and the answer is confirmed by evaluating n and n + 1.
int max_users_irsa(double delta_target, double rho, int m, const DegreeDistribution& degrees,
                   const PlrModel& plr_model);

}  // namespace irsa_aoi
