#include "wcharge/welfare.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "wcharge/line_search.hpp"

namespace wcharge {

double social_welfare(const BidVector& bids, const ChargingGame& game) {
    game.check_bids(bids);
    double gain = 0.0;
    for (std::size_t i = 0; i < bids.size(); ++i) {
        gain += game.aggregate(i) * bids[i] - bids[i] * bids[i];
    }
    return game.price_weight() * game.transmit_power() * gain / bids.sum();
}

double cooperative_supremum(const ChargingGame& game) {
    return game.price_weight() * game.transmit_power() * game.max_aggregate();
}

namespace {

struct AscentRun {
    std::vector<double> x;
    double value;
    int sweeps;
    bool stalled;
};

// Coordinate ascent from `x`. Along coordinate i the welfare is
// lambda P (c + K_i t - t^2) / (T + t), which is linear plus B / (T + t):
// concave when B < 0, convex otherwise. Golden section handles the first
// case and the interval endpoints the second, so the best of the three is the
// exact coordinate maximum either way.
AscentRun ascend(const ChargingGame& game, std::vector<double> x, double lo, double hi,
                 const AscentOptions& options) {
    const std::size_t m = x.size();
    const double scale = game.price_weight() * game.transmit_power();
    auto total_gain = [&] {
        double g = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            g += game.aggregate(i) * x[i] - x[i] * x[i];
        }
        return g;
    };
    auto total_bid = [&] {
        double t = 0.0;
        for (double v : x) {
            t += v;
        }
        return t;
    };

    double value = scale * total_gain() / total_bid();
    for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
        const double before = value;
        for (std::size_t i = 0; i < m; ++i) {
            const double k = game.aggregate(i);
            const double c = total_gain() - (k * x[i] - x[i] * x[i]);
            const double rest = total_bid() - x[i];
            auto along = [&](double t) { return scale * (c + k * t - t * t) / (rest + t); };

            double best_t = x[i];
            double best_v = along(x[i]);
            for (double t : {lo, hi}) {
                const double v = along(t);
                if (v > best_v) {
                    best_v = v;
                    best_t = t;
                }
            }
            if (lo < hi) {
                const auto [t, v] = golden_section_max(along, lo, hi, 1e-14);
                if (v > best_v) {
                    best_v = v;
                    best_t = t;
                }
            }
            x[i] = best_t;
            value = scale * total_gain() / total_bid();
        }
        if (std::abs(value - before) < options.objective_tolerance * std::max(1.0, std::abs(value))) {
            return {std::move(x), value, sweep, false};
        }
    }
    return {std::move(x), value, options.max_sweeps, true};
}

}  // namespace

BoxOptimum constrained_cooperative_optimum(const ChargingGame& game, double box_lo, double box_hi,
                                           const AscentOptions& options) {
    if (!(box_lo > 0.0 && box_lo <= box_hi && std::isfinite(box_hi))) {
        throw std::invalid_argument("box must satisfy 0 < box_lo <= box_hi");
    }
    if (options.starts < 1 || options.max_sweeps < 1 || !(options.objective_tolerance > 0.0)) {
        throw std::invalid_argument("invalid ascent options");
    }
    const std::size_t m = game.size();
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> draw(box_lo, box_hi);

    BoxOptimum best;
    best.value = -INFINITY;
    for (int s = 0; s < options.starts; ++s) {
        std::vector<double> start(m, 0.5 * (box_lo + box_hi));
        if (s > 0 && box_lo < box_hi) {
            for (auto& v : start) {
                v = draw(rng);
            }
        }
        AscentRun run = ascend(game, std::move(start), box_lo, box_hi, options);
        best.sweeps += run.sweeps;
        best.stalled = best.stalled || run.stalled;
        if (run.value > best.value) {
            best.value = run.value;
            best.argmax = BidVector(std::move(run.x));
        }
    }
    return best;
}

double price_of_anarchy(const ChargingGame& game, const SolverSettings& settings) {
    const auto sol = solve_nash(game, settings);
    const double welfare = social_welfare(sol.bids, game);
    if (!(welfare > 0.0)) {
        throw std::domain_error("price of anarchy undefined: equilibrium welfare is not positive");
    }
    return cooperative_supremum(game) / welfare;
}

WelfareReport welfare_report(const ChargingGame& game, const SolverSettings& settings, double box_lo,
                             double box_hi) {
    WelfareReport r;
    r.equilibrium = solve_nash(game, settings).bids;
    r.equilibrium_welfare = social_welfare(r.equilibrium, game);
    r.cooperative_supremum = cooperative_supremum(game);
    r.constrained = constrained_cooperative_optimum(game, box_lo, box_hi);
    if (!(r.equilibrium_welfare > 0.0)) {
        throw std::domain_error("price of anarchy undefined: equilibrium welfare is not positive");
    }
    r.poa = r.cooperative_supremum / r.equilibrium_welfare;
    return r;
}

}  // namespace wcharge
