#include <doctest.h>

#include <cmath>

#include "irsa_aoi/plr.hpp"
#include "oracles/oracles.hpp"

using namespace irsa_aoi;

TEST_CASE("phi at zero load keeps only the constant term")
{
    CHECK(phi(1, 0.0, 100) == -1.0);
    CHECK(phi(2, 0.0, 100) == 2.0);
    CHECK_THROWS_AS(phi(0, 0.1, 100), std::out_of_range);
    CHECK_THROWS_AS(phi(3, 0.1, 100), std::out_of_range);
}

TEST_CASE("phi matches the exact rational sum")
{
    // m G = 1/2 with m = 100, G = 1/200
    CHECK(phi(1, 1.0 / 200, 100) == doctest::Approx(static_cast<double>(oracle::phi(2, oracle::Rational(1, 2)))));
    for (int m : {50, 200, 1000})
        for (int g10 = 1; g10 <= 9; ++g10) {
            const oracle::Rational g(g10, 10);
            for (int s = 1; s <= 2; ++s) {
                const double want = static_cast<double>(oracle::phi(s + 1, g * m));
                CHECK(phi(s, g10 / 10.0, m) == doctest::Approx(want).epsilon(1e-12));
            }
        }
}

TEST_CASE("error floor matches exact arithmetic")
{
    const ErrorFloorConstants k;
    CHECK(k.nu == std::vector<int>{2, 3});
    CHECK(k.mu == std::vector<int>{3, 4});
    CHECK(k.c == std::vector<int>{1, 24});
    for (int m : {50, 100, 200, 500, 1000})
        for (int g20 : {1, 3, 6, 10, 14, 18}) {
            const double want = static_cast<double>(oracle::error_floor(oracle::Rational(g20, 20), m, k.nu, k.mu, k.c));
            CHECK(plr_error_floor(g20 / 20.0, m, k) == doctest::Approx(want).epsilon(1e-10));
        }
}

TEST_CASE("error floor drops with longer frames")
{
    CHECK(plr_error_floor(0.3, 1000) < plr_error_floor(0.3, 200));
    CHECK_THROWS_AS(plr_error_floor(0.3, 3), std::invalid_argument);
}

TEST_CASE("Q function")
{
    CHECK(q_function(0.0) == 0.5);
    CHECK(q_function(-40.0) == doctest::Approx(1.0));
    CHECK(std::abs(q_function(1.0) - oracle::q_function(1.0)) < 1e-10);
    for (double x = -8.0; x <= 8.0; x += 0.25)
        CHECK(std::abs(q_function(x) - oracle::q_function(x)) < 1e-10);
}

TEST_CASE("waterfall")
{
    CHECK(plr_waterfall(0.1, 500, 4000) < 1e-10);
    const WaterfallConstants w;
    const double knee = w.g_star - w.beta0 * std::pow(500.0, -2.0 / 3.0);
    CHECK(plr_waterfall(knee, 500, 4000) == doctest::Approx(w.gamma / 2).epsilon(1e-14));

    const double g = 0.8;
    const double arg = std::sqrt(500.0) * (knee - g) / std::sqrt(w.alpha0 * w.alpha0 + g * (1 - 500 * g / 4000));
    CHECK(std::abs(plr_waterfall(g, 500, 4000) - w.gamma * oracle::q_function(arg)) < 1e-9);

    CHECK_THROWS_AS(plr_waterfall(0.9, 500, 400), std::domain_error);
}

TEST_CASE("combined model: regimes, range and trends")
{
    const double ef_low = plr_error_floor(0.2, 500);
    CHECK(plr_waterfall(0.2, 500, 4000) < 1e-3 * ef_low);
    CHECK(plr_error_floor(0.85, 500) < 1e-3 * plr_waterfall(0.85, 500, 4000));

    for (int m : {100, 500}) {
        double prev = -1.0;
        for (double g = 0.05; g <= 1.0 + 1e-9; g += 0.01) {
            const double p = plr_combined(g, m, 4000);
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
            CHECK(p >= prev);
            prev = p;
        }
    }
    for (double g : {0.1, 0.2, 0.3, 0.4, 0.5}) {
        double prev = 2.0;
        for (int m : {50, 100, 200, 500, 1000}) {
            const double p = plr_combined(g, m, 4000);
            CHECK(p < prev);
            prev = p;
        }
    }
}

TEST_CASE("combined model clamps a negative raw error floor")
{
    // degree-2 constants give a negative alternating sum at tiny load
    ErrorFloorConstants k{{2}, {2}, {1}, 2};
    CHECK(plr_error_floor(1e-6, 100, k) < 0.0);
    CHECK(plr_combined(1e-6, 100, 4000, k) == 0.0);
}

TEST_CASE("PLR model variants")
{
    CHECK(PlrModel{}.name() == "combined");
    CHECK(PlrModel{}.evaluate(0.6, 200, 4000) == plr_combined(0.6, 200, 4000));
    CHECK(PlrModel::constant(0.25).evaluate(0.6, 200, 4000) == 0.25);
    CHECK_THROWS_AS(PlrModel::constant(1.5), ConfigError);

    EmpiricalPlrTable t{{0.2, 0.4, 0.8}, {1e-4, 1e-2, 0.5}};
    const auto model = PlrModel::table(t);
    CHECK(model.evaluate(0.1, 1, 1) == 1e-4);
    CHECK(model.evaluate(0.9, 1, 1) == 0.5);
    CHECK(model.evaluate(0.3, 1, 1) == doctest::Approx(0.5 * (1e-4 + 1e-2)));
    t.interpolation = EmpiricalPlrTable::Interpolation::log_linear;
    CHECK(PlrModel::table(t).evaluate(0.3, 1, 1) == doctest::Approx(1e-3));
    CHECK_THROWS_AS(PlrModel::table({{0.4, 0.2}, {0.1, 0.2}}), ConfigError);

    const auto custom = PlrModel::custom([](double g, int, int) { return 2 * g; });
    CHECK(custom.evaluate(0.2, 1, 1) == 0.4);
    CHECK(custom.evaluate(0.9, 1, 1) == 1.0);
}
