#include <doctest.h>

#include <random>

#include "irsa_aoi/sic.hpp"
#include "oracles/oracles.hpp"

using namespace irsa_aoi;

TEST_CASE("forced peeling chain")
{
    FrameTransmissionSet tx(3);
    tx.add_user(std::vector<int>{0, 1});
    tx.add_user(std::vector<int>{1, 2});
    CHECK(sic_decode(tx) == std::vector<int>{0, 1});
}

TEST_CASE("two-collision stall")
{
    FrameTransmissionSet tx(3);
    tx.add_user(std::vector<int>{0, 1});
    tx.add_user(std::vector<int>{0, 1});
    CHECK(sic_decode(tx).empty());
}

TEST_CASE("transmission set validation")
{
    FrameTransmissionSet tx(4);
    CHECK_THROWS(tx.add_user(std::vector<int>{}));
    CHECK_THROWS(tx.add_user(std::vector<int>{4}));
    CHECK_THROWS(tx.add_user(std::vector<int>{1, 1}));
    CHECK(tx.add_user(std::vector<int>{3, 0}) == 0);
    CHECK(tx.slots_of(0).size() == 2);
    tx.clear();
    CHECK(tx.users() == 0);
    CHECK(sic_decode(tx).empty());
}

TEST_CASE("peeling matches every-order brute force, with certificates")
{
    std::mt19937_64 rng(20240611);
    SicDecoder decoder;
    for (int inst = 0; inst < 3000; ++inst) {
        const int m = std::uniform_int_distribution<int>(1, 10)(rng);
        const int users = std::uniform_int_distribution<int>(0, 8)(rng);
        FrameTransmissionSet tx(m);
        std::vector<std::vector<int>> placement;
        for (int u = 0; u < users; ++u) {
            const int ell = std::uniform_int_distribution<int>(1, std::min(m, 4))(rng);
            std::vector<int> all(m);
            for (int s = 0; s < m; ++s)
                all[s] = s;
            std::shuffle(all.begin(), all.end(), rng);
            all.resize(ell);
            placement.push_back(all);
            tx.add_user(all);
        }
        const auto finals = oracle::peeling_fixpoints(m, placement);
        REQUIRE(finals.size() == 1);
        const auto got = decoder.decode(tx);
        CHECK(std::vector<int>(got.begin(), got.end()) == *finals.begin());

        // each decoded user came from a slot that was a singleton at its step
        std::vector<int> count(m, 0);
        for (const auto& p : placement)
            for (int s : p)
                ++count[s];
        for (const auto& step : decoder.steps()) {
            CHECK(count[step.slot] == 1);
            const auto& mine = placement[step.user];
            CHECK(std::find(mine.begin(), mine.end(), step.slot) != mine.end());
            for (int s : mine)
                --count[s];
        }
    }
}
