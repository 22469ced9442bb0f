#include <doctest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "wcharge/dynamics.hpp"

using namespace wcharge;
using namespace wcharge::testing;

namespace {

// Symmetric fixed point of x = sqrt(S^2 + K S) - S with S = (M - 1) x:
// (x + S)^2 = S^2 + K S  =>  x (2M - 1) = K (M - 1).
double symmetric_equilibrium(std::size_t m, double k) {
    return k * static_cast<double>(m - 1) / static_cast<double>(2 * m - 1);
}

SolverSettings from(InitMode init, double tol = 1e-9) {
    SolverSettings s;
    s.tolerance = tol;
    s.init = std::move(init);
    return s;
}

}  // namespace

TEST_CASE("settings validation") {
    SolverSettings s;
    CHECK_NOTHROW(s.validate());
    s.tolerance = 0.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = {};
    s.max_iterations = 0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = {};
    s.init = ConstantInit{-1.0};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.init = ExplicitInit{{1.0, 0.0}};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.init = RandomUniformInit{0.0, 1.0, 1};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("initial bids") {
    const auto game = game_with_aggregates({0.4, 1.0, 3.0});
    const auto half = initial_bids(game, HalfK{});
    CHECK(half == BidVector({0.2, 0.5, 1.5}));
    CHECK(initial_bids(game, ConstantInit{0.7}) == BidVector::constant(3, 0.7));
    CHECK_THROWS_AS(initial_bids(game, ExplicitInit{{1.0, 2.0}}), std::invalid_argument);
    const auto r1 = initial_bids(game, RandomUniformInit{0.1, 0.2, 42});
    const auto r2 = initial_bids(game, RandomUniformInit{0.1, 0.2, 42});
    CHECK(r1 == r2);
    for (double v : r1) {
        CHECK(v >= 0.1);
        CHECK(v <= 0.2);
    }
}

TEST_CASE("iterate_sync") {
    const auto sym = symmetric_game(2, 1.0);
    const auto fixed = iterate_sync(BidVector::constant(2, 1.0 / 3.0), sym);
    CHECK(max_abs_diff(fixed, BidVector::constant(2, 1.0 / 3.0)) < 1e-15);

    std::mt19937_64 rng(8);
    for (int t = 0; t < 50; ++t) {
        const auto game = random_desk_game(rng, 2 + t % 10);
        const auto u = initial_bids(game, HalfK{});
        const auto below_u = iterate_sync(u, game);
        const auto tiny = BidVector::constant(game.size(), 1e-6);
        const auto above_tiny = iterate_sync(tiny, game);
        for (std::size_t i = 0; i < game.size(); ++i) {
            CHECK(below_u[i] < u[i]);
            CHECK(above_tiny[i] > tiny[i]);
        }
    }
}

TEST_CASE("solve_nash symmetric closed form") {
    for (std::size_t m = 2; m <= 10; ++m) {
        for (double k : {0.125, 1.0, 3.0}) {
            const auto sol = solve_nash(symmetric_game(m, k));
            CHECK(sol.trace.converged);
            for (double v : sol.bids) {
                CHECK(std::abs(v - symmetric_equilibrium(m, k)) < 1e-9);
            }
        }
    }
    CHECK(symmetric_equilibrium(2, 1.0) == doctest::Approx(1.0 / 3.0));
    CHECK(symmetric_equilibrium(3, 1.0) == doctest::Approx(0.4));
}

TEST_CASE("solve_nash trace bookkeeping") {
    std::mt19937_64 rng(77);
    const auto game = random_desk_game(rng, 4);
    const auto sol = solve_nash(game);
    const auto& tr = sol.trace;
    CHECK(tr.residuals.size() + 1 == tr.iterates.size());
    CHECK(tr.part_distances.size() == tr.iterates.size());
    CHECK(tr.iterations_used == static_cast<int>(tr.residuals.size()));
    CHECK(tr.residuals.back() < 1e-9);
    CHECK(sol.fixed_point_residual < 1e-9);
    CHECK(tr.part_distances.back() == 0.0);
}

TEST_CASE("solve_nash desk instance converges fast") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 20; ++t) {
        const auto game = random_desk_game(rng, 2);
        const auto sol = solve_nash(game, from(HalfK{}, 1e-6));
        CHECK(sol.trace.iterations_used <= 30);
    }
}

TEST_CASE("solve_nash uniqueness from far-apart starts") {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 20; ++t) {
        const auto game = random_desk_game(rng, 2 + t % 6);
        std::vector<double> ten_k;
        for (double k : game.aggregate()) {
            ten_k.push_back(10 * k);
        }
        const auto a = solve_nash(game, from(HalfK{}));
        const auto b = solve_nash(game, from(ExplicitInit{ten_k}));
        CHECK(max_abs_diff(a.bids, b.bids) < 1e-6);
    }
}

TEST_CASE("solve_nash non-convergence is reported") {
    const auto game = symmetric_game(3, 1.0);
    SolverSettings s;
    s.max_iterations = 2;
    s.tolerance = 1e-12;
    try {
        solve_nash(game, s);
        FAIL("expected NonConvergence");
    } catch (const NonConvergence& e) {
        CHECK(e.trace().iterations_used == 2);
        CHECK_FALSE(e.trace().converged);
    }
}

TEST_CASE("part_metric") {
    const BidVector y({0.3, 2.0, 5.0});
    CHECK(part_metric(y, y) == 0.0);
    CHECK(part_metric(BidVector({0.6, 4.0, 10.0}), y) == doctest::Approx(std::log(2.0)));
    CHECK(part_metric(BidVector({1.0, 4.0}), BidVector({2.0, 1.0})) == doctest::Approx(std::log(4.0)));
    CHECK_THROWS_AS(part_metric(BidVector({1.0}), y), std::invalid_argument);
}

TEST_CASE("estimate_rate") {
    const auto sym = solve_nash(symmetric_game(2, 1.0));
    CHECK(estimate_rate(sym.trace) < 0.0);

    // Already at the fixed point: residuals are zero, slope undefined.
    const auto at_fixed = solve_nash(symmetric_game(2, 1.0),
                                     from(ConstantInit{1.0 / 3.0}));
    ConvergenceTrace constant = at_fixed.trace;
    while (constant.iterates.size() < 5) {
        constant.iterates.push_back(constant.iterates.back());
        constant.residuals.push_back(0.0);
    }
    CHECK_THROWS_AS(estimate_rate(constant), std::domain_error);

    ConvergenceTrace short_trace;
    short_trace.iterates = {BidVector({1.0, 1.0}), BidVector({0.5, 0.5})};
    short_trace.residuals = {0.5};
    CHECK_THROWS_AS(estimate_rate(short_trace), std::domain_error);

    std::mt19937_64 rng(5);
    const auto game = random_desk_game(rng, 5);
    const auto sol = solve_nash(game, from(ConstantInit{1e-3}));
    CHECK(std::exp(estimate_rate(sol.trace)) < 1.0);
}

TEST_CASE("check_monotone") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 30; ++t) {
        const auto game = random_desk_game(rng, 2 + t % 8);
        CHECK(check_monotone(solve_nash(game, from(HalfK{})).trace) == Monotonicity::Decreasing);
        CHECK(check_monotone(solve_nash(game, from(ConstantInit{1e-6})).trace) ==
              Monotonicity::Increasing);
    }

    // Instance drawn from seed 4242 (M = 3), started with user 0 far above and
    // the others far below the equilibrium.
    std::mt19937_64 mixed_rng(4242);
    const auto game = random_desk_game(mixed_rng, 3);
    const auto star = solve_nash(game).bids;
    const auto trace = solve_nash(game, from(ExplicitInit{{10 * star[0], 1e-3 * star[1], 1e-3 * star[2]}})).trace;
    CHECK(check_monotone(trace) == Monotonicity::NonMonotone);

    CHECK(std::string(to_string(Monotonicity::Increasing)) == "increasing");
}

TEST_CASE("property: bounded iterates, faster-from-u, part-metric contraction") {
    std::mt19937_64 rng(31337);
    for (int t = 0; t < 40; ++t) {
        const auto game = random_desk_game(rng, 2 + t % 12);
        // Exact floating-point limit of the decreasing run from u.
        const auto star = solve_nash(game, from(HalfK{}, 1e-300)).bids;

        std::vector<double> above;
        for (double k : game.aggregate()) {
            above.push_back(k / 2 * std::uniform_real_distribution<double>(1.01, 20.0)(rng));
        }
        auto x = initial_bids(game, HalfK{});
        auto y = BidVector(above);
        for (int n = 1; n <= 40; ++n) {
            x = iterate_sync(x, game);
            y = iterate_sync(y, game);
            for (std::size_t i = 0; i < x.size(); ++i) {
                CHECK(x[i] > 0.0);
                CHECK(x[i] < game.aggregate(i) / 2);
                CHECK(x[i] <= y[i]);
            }
            CHECK(max_abs_diff(x, star) <= max_abs_diff(y, star));
        }

        const auto trace = solve_nash(game, from(HalfK{})).trace;
        for (std::size_t n = 1; n < trace.iterates.size(); ++n) {
            CHECK(part_metric(trace.iterates[n], star) <= part_metric(trace.iterates[n - 1], star));
        }
    }
}

TEST_CASE("property: multi-start uniqueness") {
    std::mt19937_64 rng(404);
    for (int t = 0; t < 5; ++t) {
        const auto game = random_desk_game(rng, 2 + t * 3);
        const auto ref = solve_nash(game).bids;
        for (std::uint64_t s = 0; s < 100; ++s) {
            const auto sol = solve_nash(game, from(RandomUniformInit{1e-4, 10 * game.max_aggregate(), s}));
            CHECK(max_abs_diff(sol.bids, ref) < 1e-6);
        }
    }
}

TEST_CASE("property: lambda homogeneity and P independence of the equilibrium") {
    std::mt19937_64 rng(64);
    for (int t = 0; t < 30; ++t) {
        const auto game = random_desk_game(rng, 2 + t % 9);
        const double c = std::uniform_real_distribution<double>(0.25, 4.0)(rng);
        const auto base = solve_nash(game).bids;
        const auto scaled = solve_nash(game.with_price_weight(c)).bids;
        const auto doubled = solve_nash(game.with_transmit_power(2 * game.transmit_power())).bids;
        CHECK(base == doubled);
        for (std::size_t i = 0; i < base.size(); ++i) {
            CHECK(std::abs(scaled[i] - base[i] / c) < 1e-8);
        }
    }
}
