#ifndef WCHARGE_ORACLE_HPP
#define WCHARGE_ORACLE_HPP

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wcharge/game.hpp"

namespace wcharge {

// Brute-force references for the closed-form game math. Nothing here calls
// best_response(); the only shared code is the utility itself.

struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    int steps = 10000;

    /// lo = 1e-4 K_i, hi = K_i, 10^4 steps.
    static GridSpec for_user(const ChargingGame& game, std::size_t user);

    void validate() const;
};

/// The grid argmax sits on an endpoint, so the true optimum may lie outside.
class OracleRangeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argmax of U_user over the grid, refined by golden section on the two
/// cells around the best grid point.
double brute_force_best_response(std::size_t user, const BidVector& bids, const ChargingGame& game,
                                 const GridSpec& grid);
double brute_force_best_response(std::size_t user, const BidVector& bids, const ChargingGame& game);

using GameSampler = std::function<ChargingGame(std::mt19937_64&)>;

struct PropertyViolation {
    std::string property;  ///< "monotonicity", "scaling-down" or "scaling-up"
    int trial = 0;
    std::uint64_t trial_seed = 0;
    std::size_t user = 0;
    std::size_t users = 0;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct PropertyReport {
    int trials = 0;
    std::uint64_t seed = 0;
    long monotonicity_checks = 0;
    long scaling_checks = 0;
    std::vector<PropertyViolation> violations;

    bool passed() const noexcept { return violations.empty(); }
};

/// Checks monotonicity (x <= y implies F(x) <= F(y)) and strict scaling
/// (F(a x) > a F(x), F(x)/a > F(x/a) for 0 < a < 1) on `trials` random
/// (game, x, y, a) tuples. Trial t draws everything from a generator seeded
/// with derive_seed(seed, {t}).
PropertyReport property_battery(const GameSampler& sampler, int trials, std::uint64_t seed);

/// Re-runs a single tuple, e.g. a recorded counterexample.
std::vector<PropertyViolation> check_property_tuple(const GameSampler& sampler, std::uint64_t trial_seed);

/// Desk-scale sampler: M uniform in [min_users, max_users], C/D in [1, 3] W,
/// h in [0.11, 0.19], P = 20 W, lambda = 1.
GameSampler desk_sampler(std::size_t min_users = 2, std::size_t max_users = 8);

nlohmann::json to_json(const PropertyReport& report);

}  // namespace wcharge

#endif  // WCHARGE_ORACLE_HPP
