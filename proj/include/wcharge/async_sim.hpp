#ifndef WCHARGE_ASYNC_SIM_HPP
#define WCHARGE_ASYNC_SIM_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "wcharge/dynamics.hpp"
#include "wcharge/game.hpp"

namespace wcharge {

/// Deterministic update schedule: returns true if `user` recomputes its bid
/// in `round` (rounds start at 1).
using UpdateSchedule = std::function<bool(std::size_t user, std::uint64_t round)>;

/// Lossy broadcast network between users.
///
/// Link j -> i delivers j's current bid in a round with probability
/// delivery(j, i). Each user recomputes its bid in a round with probability
/// update_prob[i], unless a deterministic schedule is installed.
struct AsyncNetworkModel {
    std::size_t users = 0;
    std::vector<double> delivery_prob;  ///< row-major users x users, (from, to); diagonal ignored
    std::vector<double> update_prob;    ///< per user, in (0, 1]
    std::uint64_t seed = 0;
    UpdateSchedule schedule;            ///< overrides update_prob when set
    std::uint64_t schedule_period = 0;  ///< rounds within which the schedule visits every user

    static AsyncNetworkModel uniform(std::size_t users, double delivery, std::uint64_t seed,
                                     double update = 1.0);

    double delivery(std::size_t from, std::size_t to) const { return delivery_prob[from * users + to]; }

    /// Smallest off-diagonal delivery probability and update probability.
    double min_probability() const;

    /// True when every message arrives and every user updates every round.
    bool is_reliable() const;

    /// Rounds used by run_async's sliding-window convergence test.
    std::uint64_t convergence_window() const;

    void validate(std::size_t game_users) const;
};

/// Users update one at a time in index order: user (n - 1) mod M in round n.
UpdateSchedule round_robin_schedule(std::size_t users);

/// Per-user view of everyone else's bids.
struct MailboxState {
    std::size_t users = 0;
    std::vector<double> last_received;         ///< (i, j): freshest bid of j known to i
    std::vector<std::uint64_t> emitted_round;  ///< (i, j): round in which j produced that bid
    std::vector<std::uint64_t> age;            ///< (i, j): rounds since the last delivery j -> i
    std::vector<std::uint64_t> bid_round;      ///< round in which each user produced its current bid
    std::vector<std::uint64_t> last_update;    ///< last round each user recomputed (0 = never)

    /// Everyone knows everyone's initial bid; all ages zero.
    static MailboxState broadcast(const BidVector& initial);

    std::size_t at(std::size_t i, std::size_t j) const { return i * users + j; }
    double known(std::size_t i, std::size_t j) const { return last_received[at(i, j)]; }
    std::uint64_t max_age() const;
};

struct AsyncStep {
    MailboxState state;
    BidVector bids;
};

/// One round: deliveries of the current bids on every link, then updates from
/// the (possibly stale) mailboxes. Users that do not update keep their bid.
/// All randomness is a pure function of (model.seed, round, link or user).
AsyncStep step_async(const MailboxState& state, const BidVector& bids, const AsyncNetworkModel& model,
                     const ChargingGame& game, std::uint64_t round);

/// Iterates step_async from settings.init until the sliding-window residual
/// drops below tolerance. Throws NonConvergence at the cap.
Solution run_async(const ChargingGame& game, const AsyncNetworkModel& model, const SolverSettings& settings = {});

}  // namespace wcharge

#endif  // WCHARGE_ASYNC_SIM_HPP
