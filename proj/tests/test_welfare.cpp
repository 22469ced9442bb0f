#include <doctest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "wcharge/welfare.hpp"

using namespace wcharge;
using namespace wcharge::testing;

namespace {

// Exhaustive grid over [lo, hi]^M with `steps` cells per axis, M <= 3.
double grid_max_welfare(const ChargingGame& game, double lo, double hi, int steps) {
    const std::size_t m = game.size();
    const double h = (hi - lo) / steps;
    double best = -INFINITY;
    std::vector<int> idx(m, 0);
    while (true) {
        std::vector<double> x(m);
        for (std::size_t i = 0; i < m; ++i) {
            x[i] = lo + idx[i] * h;
        }
        best = std::max(best, social_welfare(BidVector(x), game));
        std::size_t d = 0;
        while (d < m && ++idx[d] > steps) {
            idx[d++] = 0;
        }
        if (d == m) {
            break;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("social_welfare") {
    for (std::size_t m = 2; m <= 10; ++m) {
        const auto game = symmetric_game(m, 1.0);
        const double x = static_cast<double>(m - 1) / static_cast<double>(2 * m - 1);
        const double expected = static_cast<double>(m) * 20.0 / static_cast<double>(2 * m - 1);
        CHECK(social_welfare(BidVector::constant(m, x), game) == doctest::Approx(expected).epsilon(1e-13));
    }
    CHECK(social_welfare(BidVector::constant(2, 1.0 / 3.0), symmetric_game(2, 1.0)) ==
          doctest::Approx(40.0 / 3.0).epsilon(1e-14));

    // Symmetric bids c give lambda P (K - c).
    const auto game = symmetric_game(4, 1.0);
    double previous = INFINITY;
    for (double c : {0.1, 0.4, 0.9}) {
        const double w = social_welfare(BidVector::constant(4, c), game);
        CHECK(w == doctest::Approx(20.0 * (1.0 - c)).epsilon(1e-14));
        CHECK(w < previous);
        previous = w;
    }

    std::mt19937_64 rng(1);
    const auto g = random_desk_game(rng, 5);
    const auto x = random_bids(rng, 5, 1e-3, 0.1);
    CHECK(social_welfare(x, g.with_transmit_power(40.0)) == doctest::Approx(2 * social_welfare(x, g)).epsilon(1e-14));
    double sum = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        sum += utility(i, x, g);
    }
    CHECK(social_welfare(x, g) == doctest::Approx(sum).epsilon(1e-13));
}

TEST_CASE("cooperative_supremum") {
    CHECK(cooperative_supremum(symmetric_game(3, 1.0)) == doctest::Approx(20.0));
    const auto two = game_with_aggregates({1.0, 2.0});
    CHECK(cooperative_supremum(two) == doctest::Approx(40.0));
    CHECK(cooperative_supremum(two.with_transmit_power(40.0)) == doctest::Approx(80.0));

    // Approached along x = t e_max as t -> 0 (other bids much smaller still).
    const double near = social_welfare(BidVector({1e-12, 1e-6}), two);
    CHECK(near < 40.0);
    CHECK(near == doctest::Approx(40.0).epsilon(1e-5));
    // Grid over a small box never exceeds it.
    CHECK(grid_max_welfare(two, 1e-3, 2.0, 200) <= 40.0);
}

TEST_CASE("constrained optimum against exhaustive grid") {
    {
        const auto game = symmetric_game(2, 1.0);
        const auto opt = constrained_cooperative_optimum(game, 1e-3, 1.0);
        const double grid = grid_max_welfare(game, 1e-3, 1.0, 200);
        CHECK(std::abs(opt.value - grid) <= 1e-3 * std::abs(grid));
        CHECK(opt.value == doctest::Approx(20.0 * (1.0 - 1e-3)).epsilon(1e-9));
        CHECK_FALSE(opt.stalled);
    }
    {
        const auto game = game_with_aggregates({1.0, 2.0});
        const auto opt = constrained_cooperative_optimum(game, 1e-3, 2.0);
        const double grid = grid_max_welfare(game, 1e-3, 2.0, 200);
        CHECK(std::abs(opt.value - grid) <= 1e-3 * std::abs(grid));
        CHECK(opt.argmax[1] > opt.argmax[0]);
        CHECK(opt.value > 38.0);
        CHECK(opt.value < 40.0);
    }
}

TEST_CASE("degenerate box") {
    const auto game = game_with_aggregates({0.3, 0.7, 1.1});
    const auto opt = constrained_cooperative_optimum(game, 0.2, 0.2);
    CHECK(opt.argmax == BidVector::constant(3, 0.2));
    CHECK(opt.value == doctest::Approx(social_welfare(BidVector::constant(3, 0.2), game)));
    CHECK_THROWS_AS(constrained_cooperative_optimum(game, 0.3, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(constrained_cooperative_optimum(game, 0.0, 0.2), std::invalid_argument);
}

TEST_CASE("price_of_anarchy") {
    CHECK(price_of_anarchy(symmetric_game(2, 1.0)) == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(price_of_anarchy(symmetric_game(3, 0.125)) == doctest::Approx(5.0 / 3.0).epsilon(1e-7));
    CHECK(price_of_anarchy(symmetric_game(10, 2.0)) == doctest::Approx(1.9).epsilon(1e-9));

    double previous = 1.0;
    for (std::size_t m = 2; m <= 20; ++m) {
        const double poa = price_of_anarchy(symmetric_game(m, 0.125));
        CHECK(poa >= previous);
        CHECK(poa < 2.0);
        previous = poa;
    }

    std::mt19937_64 rng(2);
    for (int t = 0; t < 50; ++t) {
        const auto game = random_desk_game(rng, 2 + t % 10);
        CHECK(price_of_anarchy(game) >= 1.0);
    }
}

TEST_CASE("property: supremum dominance and shrinking gap") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 10; ++t) {
        const auto game = random_desk_game(rng, 2 + t % 3);
        const double sup = cooperative_supremum(game);
        double previous = -INFINITY;
        for (double lo : {1e-1, 1e-2, 1e-3}) {
            const auto opt = constrained_cooperative_optimum(game, lo, 1.0);
            CHECK(opt.value <= sup);
            CHECK(opt.value > previous);
            previous = opt.value;
        }
        const auto star = solve_nash(game).bids;
        CHECK(social_welfare(star, game) < sup);
    }
}

TEST_CASE("property: grid agreement for M <= 3") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 6; ++t) {
        const auto game = random_desk_game(rng, 2 + t % 2);
        const double hi = game.max_aggregate();
        const auto opt = constrained_cooperative_optimum(game, 1e-2, hi);
        const double grid = grid_max_welfare(game, 1e-2, hi, 200);
        CHECK(opt.value >= grid - 1e-12);
        CHECK(std::abs(opt.value - grid) <= 1e-3 * std::abs(grid));
    }
}

TEST_CASE("property: equilibrium welfare does not depend on lambda") {
    // x* scales as 1/lambda and K as 1/lambda, so
    // lambda P (sum K x - sum x^2) / sum x is unchanged.
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        const auto game = random_desk_game(rng, 2 + t % 9);
        const double w1 = social_welfare(solve_nash(game).bids, game);
        for (double lambda : {0.5, 2.0}) {
            const auto g = game.with_price_weight(lambda);
            CHECK(social_welfare(solve_nash(g).bids, g) == doctest::Approx(w1).epsilon(1e-8));
        }
    }
}

TEST_CASE("welfare report") {
    const auto game = symmetric_game(3, 1.0);
    const auto r = welfare_report(game, {}, 1e-3, 1.0);
    CHECK(r.equilibrium_welfare == doctest::Approx(60.0 / 5.0).epsilon(1e-9));
    CHECK(r.cooperative_supremum == doctest::Approx(20.0));
    CHECK(r.cooperative_supremum >= r.constrained.value);
    CHECK(r.constrained.value >= r.equilibrium_welfare);
    CHECK(r.poa == doctest::Approx(5.0 / 3.0).epsilon(1e-9));
}
