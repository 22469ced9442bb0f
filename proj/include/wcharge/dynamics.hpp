#ifndef WCHARGE_DYNAMICS_HPP
#define WCHARGE_DYNAMICS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "wcharge/game.hpp"

namespace wcharge {

/// Start every user at K_i / 2, the supremum of its best response.
struct HalfK {};
struct ConstantInit {
    double value;
};
struct ExplicitInit {
    std::vector<double> bids;
};
/// Independent uniform draws in [lo, hi] from a generator seeded with `seed`.
struct RandomUniformInit {
    double lo;
    double hi;
    std::uint64_t seed;
};

using InitMode = std::variant<HalfK, ConstantInit, ExplicitInit, RandomUniformInit>;

struct SolverSettings {
    double tolerance = 1e-9;  ///< infinity-norm successive-iterate residual
    int max_iterations = 10000;
    InitMode init = HalfK{};

    void validate() const;
};

BidVector initial_bids(const ChargingGame& game, const InitMode& init);

struct ConvergenceTrace {
    std::vector<BidVector> iterates;     ///< x(0), x(1), ...
    std::vector<double> residuals;       ///< ||x(n) - x(n-1)||_inf, n >= 1
    std::vector<double> part_distances;  ///< part_metric(x(n), final iterate)
    bool converged = false;
    int iterations_used = 0;
};

struct Solution {
    BidVector bids;
    ConvergenceTrace trace;
    double fixed_point_residual = 0.0;  ///< ||x - F(x)||_inf at the returned bids
};

/// Thrown when the iteration cap is reached with the residual still at or
/// above tolerance. Carries the partial trace.
class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& what, ConvergenceTrace trace)
        : std::runtime_error(what), trace_(std::move(trace)) {}
    const ConvergenceTrace& trace() const noexcept { return trace_; }

private:
    ConvergenceTrace trace_;
};

/// One synchronous sweep x(n) = F(x(n-1)).
BidVector iterate_sync(const BidVector& bids, const ChargingGame& game);

Solution solve_nash(const ChargingGame& game, const SolverSettings& settings = {});

double max_abs_diff(const BidVector& a, const BidVector& b);

/// Thompson part metric max_i |ln(x_i / y_i)|.
double part_metric(const BidVector& x, const BidVector& y);

/// Fills trace.part_distances against the last iterate.
void fill_part_distances(ConvergenceTrace& trace);

/// Least-squares slope of ln(residual) against iteration index, using the
/// residuals above the round-off floor. exp(slope) is the mean geometric
/// contraction factor. Throws std::domain_error if fewer than 4 iterates or
/// fewer than 3 usable residuals are available.
double estimate_rate(const ConvergenceTrace& trace);

enum class Monotonicity { Decreasing, Increasing, NonMonotone };

const char* to_string(Monotonicity m);

/// Decreasing if every iterate is componentwise <= its predecessor,
/// Increasing if >=, otherwise NonMonotone. A constant trace is Decreasing.
Monotonicity check_monotone(const ConvergenceTrace& trace);

}  // namespace wcharge

#endif  // WCHARGE_DYNAMICS_HPP
