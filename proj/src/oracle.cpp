#include "wcharge/oracle.hpp"

#include <cmath>
#include <string>

#include "wcharge/line_search.hpp"
#include "wcharge/seeding.hpp"

namespace wcharge {

GridSpec GridSpec::for_user(const ChargingGame& game, std::size_t user) {
    const double k = game.aggregate(user);
    return {1e-4 * k, k, 10000};
}

void GridSpec::validate() const {
    if (!(lo > 0.0 && lo < hi && std::isfinite(hi))) {
        throw std::invalid_argument("grid must satisfy 0 < lo < hi");
    }
    if (steps < 100) {
        throw std::invalid_argument("grid needs at least 100 steps");
    }
}

double brute_force_best_response(std::size_t user, const BidVector& bids, const ChargingGame& game,
                                 const GridSpec& grid) {
    grid.validate();
    game.check_bids(bids);
    if (user >= game.size()) {
        throw std::out_of_range("user index out of range");
    }
    const double others = others_sum(user, bids);
    auto u = [&](double x) { return utility_at(user, x, others, game); };

    const double h = (grid.hi - grid.lo) / grid.steps;
    int best = 0;
    double best_u = u(grid.lo);
    for (int k = 1; k <= grid.steps; ++k) {
        const double v = u(grid.lo + k * h);
        if (v > best_u) {
            best_u = v;
            best = k;
        }
    }
    if (best == 0 || best == grid.steps) {
        throw OracleRangeError("utility maximum on grid endpoint " + std::to_string(grid.lo + best * h) +
                               "; widen the grid");
    }
    return golden_section_max(u, grid.lo + (best - 1) * h, grid.lo + (best + 1) * h, 1e-15).first;
}

double brute_force_best_response(std::size_t user, const BidVector& bids, const ChargingGame& game) {
    return brute_force_best_response(user, bids, game, GridSpec::for_user(game, user));
}

GameSampler desk_sampler(std::size_t min_users, std::size_t max_users) {
    if (min_users < 2 || max_users < min_users) {
        throw std::invalid_argument("desk sampler needs 2 <= min_users <= max_users");
    }
    return [=](std::mt19937_64& rng) {
        std::uniform_int_distribution<std::size_t> count(min_users, max_users);
        std::uniform_real_distribution<double> rate(1.0, 3.0);
        std::uniform_real_distribution<double> eff(0.11, 0.19);
        const std::size_t m = count(rng);
        std::vector<UserProfile> users;
        for (std::size_t i = 0; i < m; ++i) {
            const double r = rate(rng);
            users.push_back({r, 1.0, eff(rng)});
        }
        return ChargingGame(20.0, 1.0, std::move(users));
    };
}

std::vector<PropertyViolation> check_property_tuple(const GameSampler& sampler, std::uint64_t trial_seed) {
    std::mt19937_64 rng(trial_seed);
    const ChargingGame game = sampler(rng);
    const std::size_t m = game.size();

    // Log-uniform bids spanning four decades below 10 max K.
    std::uniform_real_distribution<double> log_bid(std::log(1e-4), std::log(10.0 * game.max_aggregate()));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> x(m);
    std::vector<double> y(m);
    const bool equal = unit(rng) < 0.1;
    for (std::size_t i = 0; i < m; ++i) {
        x[i] = std::exp(log_bid(rng));
        const bool same = equal || unit(rng) < 0.3;
        y[i] = same ? x[i] : x[i] * (1.0 + 2.0 * unit(rng));
    }
    const double alpha = 0.01 + 0.98 * unit(rng);

    const BidVector bx(x);
    const BidVector by(y);
    std::vector<double> ax(m);
    std::vector<double> dx(m);
    for (std::size_t i = 0; i < m; ++i) {
        ax[i] = alpha * x[i];
        dx[i] = x[i] / alpha;
    }
    const auto fx = joint_best_response(bx, game);
    const auto fy = joint_best_response(by, game);
    const auto fax = joint_best_response(BidVector(ax), game);
    const auto fdx = joint_best_response(BidVector(dx), game);

    std::vector<PropertyViolation> out;
    for (std::size_t i = 0; i < m; ++i) {
        if (!(fx[i] <= fy[i])) {
            out.push_back({"monotonicity", 0, trial_seed, i, m, fx[i], fy[i]});
        }
        if (!(fax[i] > alpha * fx[i])) {
            out.push_back({"scaling-down", 0, trial_seed, i, m, fax[i], alpha * fx[i]});
        }
        if (!(fx[i] / alpha > fdx[i])) {
            out.push_back({"scaling-up", 0, trial_seed, i, m, fx[i] / alpha, fdx[i]});
        }
    }
    return out;
}

PropertyReport property_battery(const GameSampler& sampler, int trials, std::uint64_t seed) {
    if (trials < 1) {
        throw std::invalid_argument("property battery needs at least one trial");
    }
    PropertyReport report;
    report.trials = trials;
    report.seed = seed;
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t trial_seed = derive_seed(seed, {static_cast<std::uint64_t>(t)});
        std::mt19937_64 peek(trial_seed);
        const std::size_t m = sampler(peek).size();
        report.monotonicity_checks += static_cast<long>(m);
        report.scaling_checks += 2 * static_cast<long>(m);
        for (auto& v : check_property_tuple(sampler, trial_seed)) {
            v.trial = t;
            report.violations.push_back(v);
        }
    }
    return report;
}

nlohmann::json to_json(const PropertyReport& report) {
    nlohmann::json j;
    j["trials"] = report.trials;
    j["seed"] = report.seed;
    j["monotonicity_checks"] = report.monotonicity_checks;
    j["scaling_checks"] = report.scaling_checks;
    j["passed"] = report.passed();
    j["violations"] = nlohmann::json::array();
    for (const auto& v : report.violations) {
        j["violations"].push_back({{"property", v.property},
                                   {"trial", v.trial},
                                   {"trial_seed", v.trial_seed},
                                   {"user", v.user},
                                   {"users", v.users},
                                   {"lhs", v.lhs},
                                   {"rhs", v.rhs}});
    }
    return j;
}

}  // namespace wcharge
