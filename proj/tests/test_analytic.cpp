#include <doctest.h>

#include <cmath>

#include "irsa_aoi/analytic.hpp"
#include "oracles/oracles.hpp"

using namespace irsa_aoi;

namespace {

SystemConfig irsa_point(int n, int m, double n_rho)
{
    return {n, m, n_rho / n, DegreeDistribution::regular(3)};
}

}  // namespace

TEST_CASE("SA delivery probability")
{
    CHECK(xi_sa(1.0, 1) == 1.0);
    CHECK(xi_sa(1.0, 2) == 0.0);
    CHECK(throughput_sa(1.0 / 4000, 4000) == doctest::Approx(std::exp(-1.0)).epsilon(1e-3));
    CHECK_THROWS(xi_sa(0.0, 3));
}

TEST_CASE("SA average age and violation")
{
    const int n = 4000;
    CHECK(min_avg_aoi_sa(n) == doctest::Approx(0.5 + n * std::exp(1.0)).epsilon(1e-3));
    CHECK(min_avg_aoi_sa(n) == doctest::Approx(avg_aoi_sa(1.0 / n, n)).epsilon(1e-12));
    CHECK(age_violation_sa(1.0, 0.01, 10) == 1.0);
    CHECK(age_violation_sa(0.3, 0.01, 10) == 1.0);
    const double xi = xi_sa(0.01, 10);
    CHECK(age_violation_sa(7.0, 0.01, 10) == doctest::Approx(std::pow(1 - xi, 6)));
    CHECK(age_violation_sa(7.9, 0.01, 10) == age_violation_sa(7.0, 0.01, 10));
    CHECK_THROWS_AS(avg_aoi_sa(1.0, 2), DivergentAgeError);
}

TEST_CASE("channel load")
{
    CHECK(channel_load(4000, 1e-4, 500) == doctest::Approx(oracle::channel_load(4000, 1e-4, 500)).epsilon(1e-14));
    CHECK(channel_load(4000, 1e-4, 500) == doctest::Approx(0.39).epsilon(0.01));
    CHECK(channel_load(1000, 1e-7, 1) == doctest::Approx(1e-4).epsilon(1e-6));
    CHECK(channel_load(4000, 1.0, 500) == 8.0);
    for (double rho : {1e-9, 1e-5, 0.01, 0.3})
        CHECK(channel_load(2000, rho, 200) == doctest::Approx(oracle::channel_load(2000, rho, 200)).epsilon(1e-13));
    CHECK(rho_for_load(4000, channel_load(4000, 3e-4, 500), 500) == doctest::Approx(3e-4).epsilon(1e-12));
}

TEST_CASE("offset PMF")
{
    CHECK(pmf_offset(1, 0.3, 1) == doctest::Approx(1.0));
    for (double rho : {1e-6, 0.01, 0.5, 1.0}) {
        const int m = 37;
        double sum = 0, mean = 0;
        for (int b = 1; b <= m; ++b) {
            sum += pmf_offset(b, rho, m);
            mean += (b - 1) * pmf_offset(b, rho, m);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
        const auto pb = OffsetPmf::last_activation(rho, m);
        CHECK(pb.mean_offset() == doctest::Approx(mean).epsilon(1e-12));
        if (rho < 1.0) {
            // closed form in 50 digits: it cancels badly for tiny rho
            using oracle::Dec50;
            const Dec50 q = boost::multiprecision::pow(Dec50(1) - Dec50(rho), m);
            const Dec50 closed = Dec50(1) / Dec50(rho) - 1 - Dec50(m) * q / (1 - q);
            CHECK(mean == doctest::Approx(static_cast<double>(closed)).epsilon(1e-9));
        }
    }
    CHECK_THROWS_AS(pmf_offset(0, 0.1, 5), std::out_of_range);
    CHECK_THROWS_AS(pmf_offset(6, 0.1, 5), std::out_of_range);
    CHECK_THROWS(OffsetPmf({0.5, 0.4}));
    const auto u = OffsetPmf::uniform(4);
    CHECK(u.tail(0) == 1.0);
    CHECK(u.tail(1) == doctest::Approx(0.75));
    CHECK(u.tail(4) == 0.0);
}

TEST_CASE("transition probabilities")
{
    const int m = 6;
    const double xi = 0.3;
    const auto pb = OffsetPmf::last_activation(0.2, m);
    for (std::int64_t i : {0, 3, 17, 40}) {
        CHECK(transition_prob(i, i + m, xi, pb) == doctest::Approx(1 - xi));
        double row = 0;
        for (std::int64_t j = 0; j < i + 3 * m; ++j)
            row += transition_prob(i, j, xi, pb);
        CHECK(row == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(transition_prob(0, m + 1, xi, pb) == 0.0);
    CHECK(transition_prob(2, 4, xi, pb) == doctest::Approx(xi * pb(5)));
}

TEST_CASE("stationary PMF against power iteration of the chain")
{
    const int m = 20, blocks = 40;
    for (auto [rho, xi] : {std::pair{0.05, 0.2}, std::pair{0.01, 0.5}, std::pair{0.3, 0.9}}) {
        const auto pb = OffsetPmf::last_activation(rho, m);
        std::vector<double> p(m);
        for (int b = 1; b <= m; ++b)
            p[b - 1] = pb(b);
        const auto pi = oracle::offset_chain_stationary(xi, p, blocks, 3000);
        double max_err = 0;
        for (int w = 0; w < (blocks - 1) * m; ++w)
            max_err = std::max(max_err, std::abs(stationary_pmf(w, xi, pb) - pi[w]));
        CHECK(max_err < 1e-8);
        double last = 0;
        for (int w = (blocks - 1) * m; w < blocks * m; ++w)
            last += pi[w];
        CHECK(last == doctest::Approx(StationaryAgeDistribution::irsa(xi, pb).tail((blocks - 1) * m - 1)).epsilon(1e-6));
    }
}

TEST_CASE("stationary PMF shapes")
{
    const int m = 10;
    const double xi = 0.25;
    const auto pb = OffsetPmf::last_activation(0.1, m);
    CHECK(stationary_pmf(0, xi, pb) == doctest::Approx(xi * pb(1)));
    const auto uniform = OffsetPmf::uniform(m);
    for (int w : {0, 7, 23, 99})
        CHECK(stationary_pmf(w, xi, uniform) == doctest::Approx(xi * std::pow(1 - xi, w / m) / m));

    const auto dist = StationaryAgeDistribution::irsa(xi, pb);
    double mass = 0, mean = 0;
    for (int w = 0; std::pow(1 - xi, w / m) / xi > 1e-14; ++w) {
        mass += dist.pmf(w);
        mean += w * dist.pmf(w);
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(mean == doctest::Approx(dist.mean()).epsilon(1e-9));
    CHECK_THROWS_AS(StationaryAgeDistribution::irsa(0.0, pb), DivergentAgeError);
}

TEST_CASE("operating point identities")
{
    for (int n : {200, 4000})
        for (int m : {50, 500})
            for (double nr : {0.1, 0.5, 0.9}) {
                const auto op = operating_point(irsa_point(n, m, nr), PlrModel{});
                CHECK(op.throughput == doctest::Approx(op.load * (1 - op.plr)).epsilon(1e-15));
                CHECK(std::abs(op.xi - m * op.throughput / n) < 1e-12);
            }
}

TEST_CASE("single lossless user")
{
    for (int m : {10, 100})
        for (double rho : {0.05, 0.5}) {
            SystemConfig cfg{1, m, rho, DegreeDistribution::regular(3)};
            // n/S = m/(1-(1-rho)^m) absorbs the frame-idle correction exactly
            CHECK(avg_aoi_irsa(cfg, PlrModel::constant(0.0)) == doctest::Approx(1.5 * m + 1 / rho).epsilon(1e-12));
        }
    SystemConfig cfg{1, 100, 0.5, DegreeDistribution::regular(3)};
    CHECK(avg_aoi_irsa(cfg, PlrModel::constant(0.0)) == doctest::Approx(152.0).epsilon(1e-12));
    CHECK(avg_aoi_irsa(SystemConfig{1, 100, 1.0, DegreeDistribution::regular(3)}, PlrModel::constant(0.0)) == 151.0);
}

TEST_CASE("average age equals the mean of the stationary law")
{
    for (double nr : {0.2, 0.6}) {
        const auto cfg = irsa_point(300, 30, nr);
        const auto op = operating_point(cfg, PlrModel{});
        const auto pb = OffsetPmf::last_activation(cfg.rho, cfg.m);
        double sum = 0;
        for (std::int64_t w = 0; std::pow(1 - op.xi, static_cast<double>(w / cfg.m)) / op.xi > 1e-15; ++w)
            sum += w * stationary_pmf(w, op.xi, pb);
        CHECK(avg_aoi_irsa(op) == doctest::Approx(1 + 1.5 * cfg.m + sum).epsilon(1e-9));
    }
}

TEST_CASE("proof identities: frame and slot sums")
{
    for (double nr : {0.1, 0.4, 0.8}) {
        const auto cfg = irsa_point(2000, 200, nr);
        const auto op = operating_point(cfg, PlrModel{});
        double frames = 0;
        for (int b = 0; std::pow(1 - op.xi, b) > 1e-18; ++b)
            frames += b * op.xi * std::pow(1 - op.xi, b);
        CHECK(cfg.m * frames == doctest::Approx(cfg.n / op.throughput - cfg.m).epsilon(1e-9));

        double slots = 0;
        for (int a = 0; a < cfg.m; ++a)
            slots += a * pmf_offset(a + 1, cfg.rho, cfg.m);
        const double q = std::pow(1 - cfg.rho, cfg.m);
        CHECK(slots == doctest::Approx(1 / cfg.rho - 1 - cfg.m * q / (1 - q)).epsilon(1e-9));
    }
}

TEST_CASE("IRSA to SA ratio for n = 4000, m = 500")
{
    const double expected[] = {0.8494, 0.7206, 0.5879};
    const double loads[] = {0.2, 0.4, 0.8};
    for (int i = 0; i < 3; ++i) {
        const auto cfg = irsa_point(4000, 500, loads[i]);
        const double ratio = avg_aoi_irsa(cfg, PlrModel{}) / avg_aoi_sa(cfg.rho, cfg.n);
        CHECK(ratio == doctest::Approx(expected[i]).epsilon(0.01 / expected[i]));
    }
}

TEST_CASE("small-rho approximation")
{
    for (int m : {50, 200, 500, 1000})
        for (double rho : {1e-6, 1e-5, 1e-4}) {
            SystemConfig cfg{4000, m, rho, DegreeDistribution::regular(3)};
            CHECK(avg_aoi_irsa_approx(cfg, PlrModel{}) == doctest::Approx(avg_aoi_irsa(cfg, PlrModel{})).epsilon(0.01));
        }
    SystemConfig coarse{20, 50, 0.1, DegreeDistribution::regular(3)};
    const auto m = PlrModel::constant(0.0);
    CHECK(std::abs(avg_aoi_irsa_approx(coarse, m) / avg_aoi_irsa(coarse, m) - 1) > 0.05);

    // the gap is -m^2 rho / 12 to leading order: signed, below one slot
    const auto cfg = irsa_point(4000, 500, 0.4);
    const double gap = avg_aoi_irsa(cfg, PlrModel{}) - avg_aoi_irsa_approx(cfg, PlrModel{});
    CHECK(gap < 1.0);
    CHECK(gap == doctest::Approx(-500.0 * 500.0 * cfg.rho / 12).epsilon(1e-3));
}

TEST_CASE("approximate age is minimized at the throughput peak")
{
    const int n = 4000, m = 200;
    int best_age = -1, best_s = -1;
    double age_min = 1e300, s_max = -1;
    for (int i = 1; i <= 200; ++i) {
        const auto cfg = irsa_point(n, m, i * 0.01);
        const auto op = operating_point(cfg, PlrModel{});
        if (op.throughput > s_max) {
            s_max = op.throughput;
            best_s = i;
        }
        const double a = avg_aoi_irsa_approx(op);
        if (a < age_min) {
            age_min = a;
            best_age = i;
        }
    }
    CHECK(best_age == best_s);
}

TEST_CASE("age violation")
{
    const auto cfg = irsa_point(500, 40, 0.6);
    const auto op = operating_point(cfg, PlrModel{});
    CHECK(age_violation_irsa(2.0 * cfg.m, op) == 1.0);
    CHECK(age_violation_irsa(0.0, op) == 1.0);
    const auto dist = StationaryAgeDistribution::irsa(op.xi, OffsetPmf::last_activation(cfg.rho, cfg.m));
    double prev = 1.0;
    for (int theta = 2 * cfg.m; theta <= 22 * cfg.m; ++theta) {
        const double z = age_violation_irsa(theta, op);
        CHECK(z <= prev);
        prev = z;
        // P{Omega > theta - 2m - 1} by summing the PMF
        const std::int64_t t = theta - 2 * cfg.m - 1;
        double tail = 1.0;
        for (std::int64_t w = 0; w <= t; ++w)
            tail -= dist.pmf(w);
        CHECK(std::abs(z - tail) < 1e-8);
    }
    CHECK(age_violation_irsa(1e7, op) < 1e-12);
    CHECK(std::abs(age_violation_irsa(2 * cfg.m + 3.5 * cfg.m, op) - dist.tail(static_cast<std::int64_t>(3.5 * cfg.m) - 1)) < 1e-8);
}

TEST_CASE("divergent age")
{
    const auto cfg = irsa_point(200, 50, 0.5);
    CHECK_THROWS_AS(avg_aoi_irsa(cfg, PlrModel::constant(1.0)), DivergentAgeError);
    CHECK_THROWS_AS(age_violation_irsa(500, cfg, PlrModel::constant(1.0)), DivergentAgeError);
}

TEST_CASE("optimal frame size")
{
    SystemConfig base{4000, 1, 0.2 / 4000, DegreeDistribution::regular(3)};
    const auto low = optimal_frame_size(base, PlrModel{}, 50, 1000);
    CHECK(low.m == 50);
    base.rho = 0.8 / 4000;
    const auto high = optimal_frame_size(base, PlrModel{}, 50, 1000);
    CHECK(high.m > low.m);
    CHECK(high.aoi == doctest::Approx(avg_aoi_irsa(SystemConfig{4000, high.m, base.rho, base.degrees}, PlrModel{})));
    CHECK_THROWS_AS(optimal_frame_size(base, PlrModel::constant(1.0), 10, 20), DivergentAgeError);
    CHECK_THROWS(optimal_frame_size(base, PlrModel{}, 20, 10));
}

TEST_CASE("dimensioning")
{
    const double rho = 0.136 / 600;
    const double target = 630 / 0.136;
    CHECK(max_users_sa(target, rho) == 215);
    CHECK(max_frame_irsa(target, rho) == 147);
    const int n = max_users_irsa(target, rho, 100, DegreeDistribution::regular(3), PlrModel{});
    CHECK(n == doctest::Approx(2600).epsilon(0.02));
    const auto model = PlrModel{};
    CHECK(avg_aoi_irsa(SystemConfig{n, 100, rho, DegreeDistribution::regular(3)}, model) <= target);
    CHECK(avg_aoi_irsa(SystemConfig{n + 1, 100, rho, DegreeDistribution::regular(3)}, model) > target);
    CHECK(max_users_irsa(2 * target, rho, 100, DegreeDistribution::regular(3), model) >= n);

    CHECK_THROWS_AS(max_frame_irsa(1.0 / rho, rho), InfeasibleTargetError);
    CHECK_THROWS_AS(max_users_sa(1.0 / rho, rho), InfeasibleTargetError);
    CHECK_THROWS_AS(max_users_irsa(1.5 * 100 + 1 / rho - 1, rho, 100, DegreeDistribution::regular(3), model),
                    InfeasibleTargetError);
}
