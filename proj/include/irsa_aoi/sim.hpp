#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "irsa_aoi/analytic.hpp"
#include "irsa_aoi/core.hpp"

namespace irsa_aoi {

using Rng = std::mt19937_64;

/// Seed of replication `index` derived from a base seed (SplitMix64 of
/// base + golden-ratio * (index + 1)), so streams do not overlap in practice
/// and do not depend on how many replications run concurrently.
std::uint64_t replication_seed(std::uint64_t base, std::uint64_t index);

/// Inverse-CDF draw in ascending-degree order.
int sample_degree(const DegreeDistribution& dist, Rng& rng);

/// Uniform ell-subset of [0, m). Keeps a permutation between calls and runs
/// a partial Fisher-Yates shuffle on it, so each draw costs O(ell).
class ReplicaPlacer {
public:
    explicit ReplicaPlacer(int m);

    std::span<const int> place(int ell, Rng& rng);

private:
    std::vector<int> perm_;
};

std::vector<int> place_replicas(int ell, int m, Rng& rng);

/// Counts of integer age values.
class AgeHistogram {
public:
    void add(std::int64_t value, std::uint64_t count = 1);
    void merge(const AgeHistogram& other);

    std::uint64_t total() const noexcept { return total_; }
    std::uint64_t count(std::int64_t value) const;
    std::uint64_t count_above(double theta) const;
    std::int64_t min_value() const;
    std::int64_t max_value() const;

    /// (value, count) pairs with non-zero count, ascending.
    std::vector<std::pair<std::int64_t, std::uint64_t>> entries() const;

private:
    std::vector<std::uint64_t> counts_;  // index = age value
    std::uint64_t total_ = 0;
};

enum class Protocol { irsa, sa };

struct SimMetrics {
    Protocol protocol = Protocol::irsa;
    int n = 0;
    int m = 1;                          ///< 1 for SA
    std::int64_t frames_run = 0;        ///< frames (IRSA) or slots (SA), burn-in included
    std::int64_t measured = 0;          ///< frames or slots after burn-in
    std::uint64_t transmitted = 0;      ///< packets sent after burn-in
    std::uint64_t decoded = 0;
    std::uint64_t age_samples = 0;      ///< node-frames (node-slots) measured
    std::uint64_t start_age_sum = 0;    ///< sum of ages at frame (slot) starts
    double empirical_plr = 0.0;
    double empirical_throughput = 0.0;  ///< decoded packets per slot
    double time_avg_aoi = 0.0;          ///< exact sawtooth time average, slots
    double mean_start_offset = 0.0;     ///< mean of start age - m - 1 (SA: - 1)
    AgeHistogram histogram;             ///< end-of-frame (end-of-slot) age before reset
    std::uint64_t seed = 0;

    /// Recomputes the derived ratios from the integer accumulators.
    void finalize();
};

/// Frame-level IRSA simulation. `frames` includes the `burn_in` frames.
/// Bernoulli traffic keeps only the last activation of each frame; the
/// Markov profile evolves an active/silent state per frame and active nodes
/// send an update generated right before the frame start.
SimMetrics simulate_irsa(const SystemConfig& cfg, const TrafficProfile& traffic, std::int64_t frames,
                         std::int64_t burn_in, std::uint64_t seed);

/// Slot-level SA simulation with activation probability cfg.rho (cfg.m and
/// the degree distribution are ignored). The histogram holds the age at the
/// end of each slot before any reset.
SimMetrics simulate_sa(const SystemConfig& cfg, std::int64_t slots, std::int64_t burn_in, std::uint64_t seed);

/// Pools replications: integer accumulators are added and histograms merged,
/// in index order. The pooled seed is the first replication's.
SimMetrics pool_metrics(std::span<const SimMetrics> runs);

/// Runs `replications` independent simulations, seeds from replication_seed,
/// at most `threads` at a time. Results are ordered by replication index.
std::vector<SimMetrics> simulate_irsa_replications(const SystemConfig& cfg, const TrafficProfile& traffic,
                                                   std::int64_t frames, std::int64_t burn_in,
                                                   std::uint64_t base_seed, int replications, int threads = 0);
std::vector<SimMetrics> simulate_sa_replications(const SystemConfig& cfg, std::int64_t slots, std::int64_t burn_in,
                                                 std::uint64_t base_seed, int replications, int threads = 0);

struct PlrEstimate {
    std::int64_t frames = 0;
    std::uint64_t transmitted = 0;
    std::uint64_t decoded = 0;

    double plr() const { return transmitted ? 1.0 - static_cast<double>(decoded) / transmitted : 0.0; }
};

/// PLR of one frame size at channel load `load`: each of n users transmits
/// with probability m*load/n, independently per frame.
PlrEstimate estimate_plr(int m, const DegreeDistribution& degrees, double load, int n, std::int64_t frames,
                         std::uint64_t seed);

/// Fraction of histogram samples strictly above theta.
double empirical_age_violation(const SimMetrics& metrics, double theta);

/// Asymptotic variance, per node-frame, of the empirical fraction of
/// frames with offset Omega > t, from the regenerative structure of the
/// offset chain (a fresh offset with probability xi each frame). Samples of
/// one node are strongly correlated; the standard error of the empirical
/// violation over N node-frames is sqrt(value / N).
double age_violation_asymptotic_variance(const StationaryAgeDistribution& dist, std::int64_t t);

/// One CSV row per run: seed, protocol, n, m, frames, measured, transmitted,
/// decoded, plr, throughput, avg_aoi, mean_start_offset.
void write_runs_csv(std::ostream& out, std::span<const SimMetrics> runs);
/// age_value, count
void write_histogram_csv(std::ostream& out, const AgeHistogram& histogram);

}  // namespace irsa_aoi
