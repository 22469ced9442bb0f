#ifndef WCHARGE_WELFARE_HPP
#define WCHARGE_WELFARE_HPP

#include <cstdint>

#include "wcharge/dynamics.hpp"
#include "wcharge/game.hpp"

namespace wcharge {

/// Sum of all utilities: lambda P (sum K_i x_i - sum x_i^2) / sum x_j.
double social_welfare(const BidVector& bids, const ChargingGame& game);

/// lambda P max_i K_i. Least upper bound of the social welfare over strictly
/// positive bids, approached as all bids shrink toward the user with the
/// largest K; never attained.
double cooperative_supremum(const ChargingGame& game);

struct BoxOptimum {
    BidVector argmax;
    double value = 0.0;
    bool stalled = false;  ///< some start hit the sweep cap before settling
    int sweeps = 0;        ///< total coordinate sweeps over all starts
};

struct AscentOptions {
    int starts = 20;
    double objective_tolerance = 1e-8;
    int max_sweeps = 10000;
    std::uint64_t seed = 0x5eed;
};

/// Maximizes the social welfare over [box_lo, box_hi]^M by multi-start
/// projected coordinate ascent. The first start is the box centre, the rest
/// are seeded uniform draws. Requires 0 < box_lo <= box_hi.
BoxOptimum constrained_cooperative_optimum(const ChargingGame& game, double box_lo, double box_hi,
                                           const AscentOptions& options = {});

/// cooperative_supremum / social_welfare(x*). Throws std::domain_error if
/// the equilibrium welfare is not positive.
double price_of_anarchy(const ChargingGame& game, const SolverSettings& settings = {});

struct WelfareReport {
    BidVector equilibrium;
    double equilibrium_welfare = 0.0;
    double cooperative_supremum = 0.0;
    BoxOptimum constrained;
    double poa = 0.0;
};

WelfareReport welfare_report(const ChargingGame& game, const SolverSettings& settings, double box_lo,
                             double box_hi);

}  // namespace wcharge

#endif  // WCHARGE_WELFARE_HPP
