#pragma once

#include <optional>
#include <vector>

#include "irsa_aoi/analytic.hpp"
#include "irsa_aoi/core.hpp"
#include "irsa_aoi/plr.hpp"

namespace irsa_aoi {

struct ActivityShares {
    double active = 0.0;
    double silent = 0.0;
};

/// Long-run fraction of frames spent active / silent: (lambda, sigma)/(lambda+sigma).
ActivityShares stationary_activity(double lambda, double sigma);

/// Load seen by the PLR model under bursty traffic, G = n p_A / m.
double bursty_load(int n, int m, double lambda, double sigma);

struct BurstyLevel {
    double silent = 0.0;
    double active = 0.0;

    double total() const noexcept { return silent + active; }
};

/// Joint stationary law of (frames since last delivery, activity state),
/// sampled at frame starts, truncated at levels.size() - 1.
struct BurstyStateDistribution {
    std::vector<BurstyLevel> levels;
    double residual = 0.0;          ///< 1 - sum of the kept levels
    double tail_mass_bound = 0.0;   ///< proven upper bound on the truncated mass
    double tail_mean_bound = 0.0;   ///< upper bound on sum_{l > max} l * pi_l
    double spectral_radius = 0.0;   ///< of the level-to-level matrix (reported only)

    int max_level() const noexcept { return static_cast<int>(levels.size()) - 1; }
};

/// Level 0 is (sigma, 1 - sigma) * lambda (1 - plr) / (lambda + sigma); each
/// further level multiplies by [[1-lambda, plr*sigma], [lambda, plr*(1-sigma)]].
///
/// Iteration stops once the truncated tail mass is provably below epsilon.
/// The matrix is not normal, so its spectral radius alone does not bound the
/// tail; ||M^2||_1 < 1 does, and ||M||_1 = 1.
BurstyStateDistribution bursty_state_distribution(double lambda, double sigma, double plr,
                                                  double epsilon = 1e-14);

struct BurstyAverageAge {
    double value = 0.0;
    double error_bound = 0.0;  ///< truncation error, slots
    double load = 0.0;
    double plr = 0.0;
    BurstyStateDistribution distribution;
};

/// 1 + 3m/2 + sum_l m l pi_l (+ E[B-1] when an offset PMF is given; by
/// default updates are generated right before the frame start). cfg.rho is
/// not used.
BurstyAverageAge avg_aoi_bursty(const SystemConfig& cfg, double lambda, double sigma, const PlrModel& plr_model,
                                double epsilon = 1e-14, const std::optional<OffsetPmf>& offsets = std::nullopt);

/// Extension, B = 1 only: fraction of frames whose end-of-frame age exceeds
/// theta, i.e. sum of pi_l over 2m + 1 + m l > theta. The truncated mass is
/// counted as exceeding theta, so the value errs high by at most the residual.
double age_violation_bursty(double theta, int m, const BurstyStateDistribution& dist);

}  // namespace irsa_aoi
