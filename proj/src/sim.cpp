#include "irsa_aoi/sim.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "irsa_aoi/sic.hpp"

namespace irsa_aoi {

std::uint64_t replication_seed(std::uint64_t base, std::uint64_t index)
{
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

int sample_degree(const DegreeDistribution& dist, Rng& rng)
{
    const auto entries = dist.entries();
    if (entries.size() == 1)
        return entries.front().degree;
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double cdf = 0.0;
    for (const auto& e : entries) {
        cdf += e.probability;
        if (u < cdf)
            return e.degree;
    }
    // u landed in the rounding gap above the last partial sum
    return entries.back().degree;
}

ReplicaPlacer::ReplicaPlacer(int m)
{
    if (m < 1)
        throw std::invalid_argument("frame size must be >= 1");
    perm_.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        perm_[i] = i;
}

std::span<const int> ReplicaPlacer::place(int ell, Rng& rng)
{
    const int m = static_cast<int>(perm_.size());
    if (ell < 1 || ell > m)
        throw std::invalid_argument(fmt::format("cannot place {} replicas in {} slots", ell, m));
    for (int i = 0; i < ell; ++i) {
        const int j = std::uniform_int_distribution<int>(i, m - 1)(rng);
        std::swap(perm_[i], perm_[j]);
    }
    return std::span<const int>(perm_).first(static_cast<std::size_t>(ell));
}

std::vector<int> place_replicas(int ell, int m, Rng& rng)
{
    ReplicaPlacer placer(m);
    auto s = placer.place(ell, rng);
    return {s.begin(), s.end()};
}

// ---------------------------------------------------------------------------

void AgeHistogram::add(std::int64_t value, std::uint64_t count)
{
    if (value < 0)
        throw std::invalid_argument("ages are non-negative");
    if (count == 0)
        return;
    const auto v = static_cast<std::size_t>(value);
    if (v >= counts_.size())
        counts_.resize(std::max(v + 1, counts_.size() * 2), 0);
    counts_[v] += count;
    total_ += count;
}

void AgeHistogram::merge(const AgeHistogram& other)
{
    if (other.counts_.size() > counts_.size())
        counts_.resize(other.counts_.size(), 0);
    for (std::size_t v = 0; v < other.counts_.size(); ++v)
        counts_[v] += other.counts_[v];
    total_ += other.total_;
}

std::uint64_t AgeHistogram::count(std::int64_t value) const
{
    if (value < 0 || static_cast<std::size_t>(value) >= counts_.size())
        return 0;
    return counts_[static_cast<std::size_t>(value)];
}

std::uint64_t AgeHistogram::count_above(double theta) const
{
    // values are integers: v > theta  <=>  v >= floor(theta) + 1
    const double first = std::floor(theta) + 1.0;
    if (first <= 0.0)
        return total_;
    if (first >= static_cast<double>(counts_.size()))
        return 0;
    std::uint64_t out = 0;
    for (auto v = static_cast<std::size_t>(first); v < counts_.size(); ++v)
        out += counts_[v];
    return out;
}

std::int64_t AgeHistogram::min_value() const
{
    for (std::size_t v = 0; v < counts_.size(); ++v)
        if (counts_[v])
            return static_cast<std::int64_t>(v);
    throw std::logic_error("empty histogram");
}

std::int64_t AgeHistogram::max_value() const
{
    for (std::size_t v = counts_.size(); v-- > 0;)
        if (counts_[v])
            return static_cast<std::int64_t>(v);
    throw std::logic_error("empty histogram");
}

std::vector<std::pair<std::int64_t, std::uint64_t>> AgeHistogram::entries() const
{
    std::vector<std::pair<std::int64_t, std::uint64_t>> out;
    for (std::size_t v = 0; v < counts_.size(); ++v)
        if (counts_[v])
            out.emplace_back(static_cast<std::int64_t>(v), counts_[v]);
    return out;
}

void SimMetrics::finalize()
{
    empirical_plr = transmitted ? 1.0 - static_cast<double>(decoded) / static_cast<double>(transmitted) : 0.0;
    empirical_throughput = measured ? static_cast<double>(decoded) / (static_cast<double>(measured) * m) : 0.0;
    if (age_samples) {
        const double mean_start = static_cast<double>(start_age_sum) / static_cast<double>(age_samples);
        time_avg_aoi = mean_start + m / 2.0;
        mean_start_offset = mean_start - (protocol == Protocol::irsa ? m + 1.0 : 1.0);
    }
}

namespace {

void check_horizon(std::int64_t total, std::int64_t burn_in)
{
    if (!(burn_in >= 0 && total > burn_in))
        throw std::invalid_argument(
            fmt::format("run length {} must exceed the burn-in {} (>= 0)", total, burn_in));
}

/// Last-activation offset p_B by inversion, for the initial condition.
int draw_initial_offset(double rho, int m, Rng& rng)
{
    if (rho >= 1.0)
        return 1;
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double x = std::log1p(-u * one_minus_pow_complement(rho, m)) / std::log1p(-rho);
    return std::clamp(static_cast<int>(std::ceil(x)), 1, m);
}

}  // namespace

SimMetrics simulate_irsa(const SystemConfig& cfg, const TrafficProfile& traffic, std::int64_t frames,
                         std::int64_t burn_in, std::uint64_t seed)
{
    validate_config(cfg);
    if (auto v = traffic_violations(traffic); !v.empty())
        throw ConfigError(std::move(v));
    check_horizon(frames, burn_in);

    const int n = cfg.n;
    const int m = cfg.m;
    Rng rng(seed);
    SimMetrics out;
    out.protocol = Protocol::irsa;
    out.n = n;
    out.m = m;
    out.seed = seed;
    out.frames_run = frames;
    out.measured = frames - burn_in;

    const auto* markov = std::get_if<TwoStateMarkov>(&traffic);
    const double rho = markov ? 0.0 : std::get<BernoulliPerSlot>(traffic).rho;

    std::vector<std::int64_t> start(static_cast<std::size_t>(n));  // age at the frame start
    std::vector<int> pending(static_cast<std::size_t>(n), 0);       // offset B of the update to send, 0 = none
    std::vector<char> delivered(static_cast<std::size_t>(n), 0);

    // Looking back from the frame end, the first active slot is the last
    // activation: B - 1 ~ Geometric(rho), and B > m means the node was idle.
    std::geometric_distribution<std::int64_t> lookback(markov ? 0.5 : rho);
    auto next_offset = [&]() -> int {
        const std::int64_t b = 1 + lookback(rng);
        return b <= m ? static_cast<int>(b) : 0;
    };
    std::bernoulli_distribution wake(markov ? markov->lambda : 0.0);
    std::bernoulli_distribution sleep(markov ? markov->sigma : 0.0);

    if (markov) {
        std::bernoulli_distribution active(markov->lambda / (markov->lambda + markov->sigma));
        for (int i = 0; i < n; ++i) {
            start[i] = m + 1;
            pending[i] = active(rng) ? 1 : 0;
        }
    } else {
        for (int i = 0; i < n; ++i) {
            start[i] = m + draw_initial_offset(rho, m, rng);
            pending[i] = next_offset();
        }
    }

    FrameTransmissionSet tx(m);
    ReplicaPlacer placer(m);
    SicDecoder decoder;
    std::vector<int> sender;

    for (std::int64_t k = 0; k < frames; ++k) {
        tx.clear();
        sender.clear();
        for (int i = 0; i < n; ++i) {
            if (pending[i] == 0)
                continue;
            tx.add_user(placer.place(sample_degree(cfg.degrees, rng), rng));
            sender.push_back(i);
        }
        const auto ok = decoder.decode(tx);
        std::fill(delivered.begin(), delivered.end(), 0);
        for (int u : ok)
            delivered[sender[u]] = 1;

        if (k >= burn_in) {
            out.transmitted += sender.size();
            out.decoded += ok.size();
            out.age_samples += static_cast<std::uint64_t>(n);
            for (int i = 0; i < n; ++i) {
                out.start_age_sum += static_cast<std::uint64_t>(start[i]);
                out.histogram.add(start[i] + m);
            }
        }

        for (int i = 0; i < n; ++i) {
            start[i] = delivered[i] ? m + pending[i] : start[i] + m;
            if (markov) {
                const bool active = pending[i] != 0;
                pending[i] = (active ? !sleep(rng) : wake(rng)) ? 1 : 0;
            } else {
                pending[i] = next_offset();
            }
        }
    }
    out.finalize();
    return out;
}

SimMetrics simulate_sa(const SystemConfig& cfg, std::int64_t slots, std::int64_t burn_in, std::uint64_t seed)
{
    validate_config(cfg);
    check_horizon(slots, burn_in);
    const int n = cfg.n;
    Rng rng(seed);
    SimMetrics out;
    out.protocol = Protocol::sa;
    out.n = n;
    out.m = 1;
    out.seed = seed;
    out.frames_run = slots;
    out.measured = slots - burn_in;

    std::binomial_distribution<int> transmitters(n, cfg.rho);
    std::uniform_int_distribution<int> pick(0, n - 1);

    // Ages are tracked lazily: a node delivered in slot `last` has age s - last
    // at the start of slot s and s - last + 1 at its end. Runs of end-of-slot
    // ages are added to a difference array when the node delivers again.
    std::vector<std::int64_t> last(static_cast<std::size_t>(n), -1);
    std::vector<std::int64_t> diff;
    auto record_run = [&](std::int64_t anchor, std::int64_t upto) {
        const std::int64_t from = std::max(anchor + 1, burn_in);
        if (upto < from)
            return;
        const std::int64_t lo = from - anchor + 1;
        const std::int64_t hi = upto - anchor + 1;
        if (static_cast<std::size_t>(hi + 2) > diff.size())
            diff.resize(static_cast<std::size_t>(std::max<std::int64_t>(hi + 2, 2 * diff.size())), 0);
        ++diff[lo];
        --diff[hi + 1];
        const std::int64_t count = upto - from + 1;
        // start ages run from lo - 1 to hi - 1
        out.start_age_sum += static_cast<std::uint64_t>((lo - 1 + hi - 1) * count / 2);
        out.age_samples += static_cast<std::uint64_t>(count);
    };

    for (std::int64_t s = 0; s < slots; ++s) {
        const int k = transmitters(rng);
        if (k == 0)
            continue;
        const bool measuring = s >= burn_in;
        if (measuring)
            out.transmitted += static_cast<std::uint64_t>(k);
        if (k != 1)
            continue;
        const int u = pick(rng);
        record_run(last[u], s);
        last[u] = s;
        if (measuring)
            ++out.decoded;
    }
    for (int i = 0; i < n; ++i)
        record_run(last[i], slots - 1);

    std::int64_t running = 0;
    for (std::size_t v = 0; v < diff.size(); ++v) {
        running += diff[v];
        if (running > 0)
            out.histogram.add(static_cast<std::int64_t>(v), static_cast<std::uint64_t>(running));
    }
    out.finalize();
    return out;
}

SimMetrics pool_metrics(std::span<const SimMetrics> runs)
{
    if (runs.empty())
        throw std::invalid_argument("nothing to pool");
    SimMetrics out;
    out.protocol = runs.front().protocol;
    out.n = runs.front().n;
    out.m = runs.front().m;
    out.seed = runs.front().seed;
    for (const auto& r : runs) {
        if (r.protocol != out.protocol || r.n != out.n || r.m != out.m)
            throw std::invalid_argument("pooled runs must share protocol, n and m");
        out.frames_run += r.frames_run;
        out.measured += r.measured;
        out.transmitted += r.transmitted;
        out.decoded += r.decoded;
        out.age_samples += r.age_samples;
        out.start_age_sum += r.start_age_sum;
        out.histogram.merge(r.histogram);
    }
    out.finalize();
    return out;
}

namespace {

template <class Fn>
std::vector<SimMetrics> run_replications(std::uint64_t base_seed, int replications, int threads, Fn&& one)
{
    if (replications < 1)
        throw std::invalid_argument("need at least one replication");
    if (threads <= 0)
        threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::vector<SimMetrics> out(static_cast<std::size_t>(replications));
    for (int first = 0; first < replications; first += threads) {
        const int last = std::min(replications, first + threads);
        std::vector<std::future<SimMetrics>> batch;
        for (int r = first; r < last; ++r)
            batch.push_back(std::async(std::launch::async, one, replication_seed(base_seed, r)));
        for (int r = first; r < last; ++r)
            out[r] = batch[r - first].get();
    }
    return out;
}

}  // namespace

std::vector<SimMetrics> simulate_irsa_replications(const SystemConfig& cfg, const TrafficProfile& traffic,
                                                   std::int64_t frames, std::int64_t burn_in,
                                                   std::uint64_t base_seed, int replications, int threads)
{
    return run_replications(base_seed, replications, threads, [&](std::uint64_t seed) {
        return simulate_irsa(cfg, traffic, frames, burn_in, seed);
    });
}

std::vector<SimMetrics> simulate_sa_replications(const SystemConfig& cfg, std::int64_t slots, std::int64_t burn_in,
                                                 std::uint64_t base_seed, int replications, int threads)
{
    return run_replications(base_seed, replications, threads,
                            [&](std::uint64_t seed) { return simulate_sa(cfg, slots, burn_in, seed); });
}

PlrEstimate estimate_plr(int m, const DegreeDistribution& degrees, double load, int n, std::int64_t frames,
                         std::uint64_t seed)
{
    validate_config(SystemConfig{n, m, 1.0, degrees});
    const double p = load * m / n;
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error(fmt::format("load {} not reachable with n = {}, m = {}", load, n, m));
    if (frames < 1)
        throw std::invalid_argument("estimate_plr: frames must be positive");
    Rng rng(seed);
    std::binomial_distribution<int> users(n, p);
    FrameTransmissionSet tx(m);
    ReplicaPlacer placer(m);
    SicDecoder decoder;
    PlrEstimate est;
    est.frames = frames;
    for (std::int64_t k = 0; k < frames; ++k) {
        tx.clear();
        const int u = users(rng);
        for (int i = 0; i < u; ++i)
            tx.add_user(placer.place(sample_degree(degrees, rng), rng));
        est.transmitted += static_cast<std::uint64_t>(u);
        est.decoded += decoder.decode(tx).size();
    }
    return est;
}

double empirical_age_violation(const SimMetrics& metrics, double theta)
{
    if (metrics.histogram.total() == 0)
        throw std::invalid_argument("empirical_age_violation: no measured ages");
    return static_cast<double>(metrics.histogram.count_above(theta)) / static_cast<double>(metrics.histogram.total());
}

double age_violation_asymptotic_variance(const StationaryAgeDistribution& dist, std::int64_t t)
{
    const double xi = dist.xi();
    const int m = dist.period();
    const double p = dist.tail(t);
    // cycle = frames between fresh offsets, L ~ Geometric(xi) on {1, 2, ...}
    const double el = 1.0 / xi;
    const double el2 = (2.0 - xi) / (xi * xi);
    double acc = 0.0;
    for (int j = 0; j < m; ++j) {
        const double pj = dist.pmf(j) / xi;  // law of the fresh offset
        if (pj == 0.0)
            continue;
        // frames of the cycle spent above t: (L - k0)^+
        const std::int64_t k0 = j > t ? 0 : (t - j) / m + 1;
        const double qk = pow_complement(xi, static_cast<double>(k0));
        const double ec2 = qk * el2;
        const double ecl = qk * (el2 + k0 * el);
        acc += pj * (ec2 - 2.0 * p * ecl + p * p * el2);
    }
    return std::max(acc / el, 0.0);
}

void write_runs_csv(std::ostream& out, std::span<const SimMetrics> runs)
{
    out << "seed,protocol,n,m,frames,measured,transmitted,decoded,plr,throughput,avg_aoi,mean_start_offset\n";
    for (const auto& r : runs)
        fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{},{}\n", r.seed, r.protocol == Protocol::irsa ? "irsa" : "sa",
                   r.n, r.m, r.frames_run, r.measured, r.transmitted, r.decoded, r.empirical_plr,
                   r.empirical_throughput, r.time_avg_aoi, r.mean_start_offset);
}

void write_histogram_csv(std::ostream& out, const AgeHistogram& histogram)
{
    out << "age_value,count\n";
    for (const auto& [v, c] : histogram.entries())
        fmt::print(out, "{},{}\n", v, c);
}

}  // namespace irsa_aoi
