#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace irsa_aoi {

/// Raised when a configuration violates one or more invariants. Every
/// violation found is listed, not only the first one.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(std::vector<std::string> violations);

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Average age diverges (no update is ever delivered).
class DivergentAgeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A design target that no configuration can meet.
class InfeasibleTargetError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct DegreeEntry {
    int degree = 0;
    double probability = 0.0;
};

/// Replica-count PMF, Lambda(x) = sum_l Lambda_l x^l.
///
/// Entries are kept in strictly increasing degree order and are normalized
/// to within 1e-12 on every construction path.
class DegreeDistribution {
public:
    static constexpr double kNormalizationTolerance = 1e-12;

    /// Validates and stores the entries. Throws ConfigError.
    explicit DegreeDistribution(std::vector<DegreeEntry> entries);

    /// Lambda(x) = x^degree.
    static DegreeDistribution regular(int degree);

    std::span<const DegreeEntry> entries() const noexcept { return entries_; }
    int max_degree() const noexcept { return entries_.back().degree; }
    double mean_degree() const noexcept;

    friend bool operator==(const DegreeDistribution&, const DegreeDistribution&) = default;

private:
    std::vector<DegreeEntry> entries_;
};

/// Violations of the DegreeDistribution invariants, empty when valid.
std::vector<std::string> degree_distribution_violations(std::span<const DegreeEntry> entries);

struct SystemConfig {
    int n = 1;                      ///< user population
    int m = 1;                      ///< frame size in slots
    double rho = 1.0;               ///< per-slot activation probability
    DegreeDistribution degrees = DegreeDistribution::regular(1);
    double slot_duration = 1.0;     ///< T_s; every AoI value is in units of T_s
};

/// Lists every violated invariant of `cfg` (empty when valid).
std::vector<std::string> config_violations(const SystemConfig& cfg);

/// Returns `cfg` unchanged, or throws ConfigError naming each violation.
const SystemConfig& validate_config(const SystemConfig& cfg);

struct BernoulliPerSlot {
    double rho = 1.0;
};

/// Per-frame active/silent chain. lambda: silent -> active, sigma: active -> silent.
struct TwoStateMarkov {
    double lambda = 1.0;
    double sigma = 1.0;
};

using TrafficProfile = std::variant<BernoulliPerSlot, TwoStateMarkov>;

std::vector<std::string> traffic_violations(const TrafficProfile& traffic);

/// x = alpha + m * beta with 0 <= alpha < m.
struct SlotDecomposition {
    std::int64_t alpha = 0;
    std::int64_t beta = 0;

    friend bool operator==(const SlotDecomposition&, const SlotDecomposition&) = default;
};

SlotDecomposition decompose(std::int64_t x, std::int64_t m);

/// (1 - p)^k, exact at p = 1 and accurate for tiny p.
double pow_complement(double p, double k);

/// 1 - (1 - p)^k, without cancellation for tiny p.
double one_minus_pow_complement(double p, double k);

}  // namespace irsa_aoi
