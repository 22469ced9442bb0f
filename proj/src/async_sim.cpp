#include "wcharge/async_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wcharge/seeding.hpp"

namespace wcharge {

namespace {

// Stream tags for derive_seed.
constexpr std::uint64_t kDeliveryStream = 1;
constexpr std::uint64_t kUpdateStream = 2;

}  // namespace

AsyncNetworkModel AsyncNetworkModel::uniform(std::size_t users, double delivery, std::uint64_t seed,
                                             double update) {
    AsyncNetworkModel model;
    model.users = users;
    model.delivery_prob.assign(users * users, delivery);
    for (std::size_t i = 0; i < users; ++i) {
        model.delivery_prob[i * users + i] = 1.0;
    }
    model.update_prob.assign(users, update);
    model.seed = seed;
    return model;
}

double AsyncNetworkModel::min_probability() const {
    double p = 1.0;
    for (std::size_t j = 0; j < users; ++j) {
        for (std::size_t i = 0; i < users; ++i) {
            if (i != j) {
                p = std::min(p, delivery(j, i));
            }
        }
    }
    if (!schedule) {
        for (double u : update_prob) {
            p = std::min(p, u);
        }
    }
    return p;
}

bool AsyncNetworkModel::is_reliable() const {
    return !schedule && min_probability() == 1.0;
}

std::uint64_t AsyncNetworkModel::convergence_window() const {
    if (is_reliable()) {
        return 1;
    }
    auto window = static_cast<std::uint64_t>(2.0 * std::ceil(1.0 / min_probability()));
    if (schedule) {
        window = std::max(window, 2 * schedule_period);
    }
    return window;
}

void AsyncNetworkModel::validate(std::size_t game_users) const {
    if (users != game_users) {
        throw std::invalid_argument("network model has " + std::to_string(users) + " users, game has " +
                                    std::to_string(game_users));
    }
    if (delivery_prob.size() != users * users) {
        throw std::invalid_argument("delivery probability matrix must be users x users");
    }
    for (std::size_t j = 0; j < users; ++j) {
        for (std::size_t i = 0; i < users; ++i) {
            const double p = delivery(j, i);
            if (i != j && !(p > 0.0 && p <= 1.0)) {
                throw std::invalid_argument("delivery probabilities must lie in (0, 1]");
            }
        }
    }
    if (schedule) {
        if (schedule_period == 0) {
            throw std::invalid_argument("a deterministic schedule needs a positive period");
        }
    } else {
        if (update_prob.size() != users) {
            throw std::invalid_argument("update probabilities must have one entry per user");
        }
        for (double u : update_prob) {
            if (!(u > 0.0 && u <= 1.0)) {
                throw std::invalid_argument("update probabilities must lie in (0, 1]");
            }
        }
    }
}

UpdateSchedule round_robin_schedule(std::size_t users) {
    return [users](std::size_t user, std::uint64_t round) { return (round - 1) % users == user; };
}

MailboxState MailboxState::broadcast(const BidVector& initial) {
    MailboxState s;
    s.users = initial.size();
    s.last_received.resize(s.users * s.users);
    for (std::size_t i = 0; i < s.users; ++i) {
        for (std::size_t j = 0; j < s.users; ++j) {
            s.last_received[s.at(i, j)] = initial[j];
        }
    }
    s.emitted_round.assign(s.users * s.users, 0);
    s.age.assign(s.users * s.users, 0);
    s.bid_round.assign(s.users, 0);
    s.last_update.assign(s.users, 0);
    return s;
}

std::uint64_t MailboxState::max_age() const {
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < users; ++i) {
        for (std::size_t j = 0; j < users; ++j) {
            if (i != j) {
                m = std::max(m, age[at(i, j)]);
            }
        }
    }
    return m;
}

AsyncStep step_async(const MailboxState& state, const BidVector& bids, const AsyncNetworkModel& model,
                     const ChargingGame& game, std::uint64_t round) {
    game.check_bids(bids);
    model.validate(game.size());
    const std::size_t m = game.size();
    if (state.users != m) {
        throw std::invalid_argument("mailbox state does not match the game size");
    }

    AsyncStep out{state, bids};
    MailboxState& s = out.state;

    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) {
                continue;
            }
            const auto slot = s.at(i, j);
            ++s.age[slot];
            const double draw = to_unit(derive_seed(model.seed, {kDeliveryStream, round, j, i}));
            if (draw < model.delivery(j, i)) {
                s.last_received[slot] = bids[j];
                s.emitted_round[slot] = state.bid_round[j];
                s.age[slot] = 0;
            }
        }
    }

    std::vector<double> next(bids.begin(), bids.end());
    for (std::size_t i = 0; i < m; ++i) {
        const bool updates = model.schedule
                                 ? model.schedule(i, round)
                                 : to_unit(derive_seed(model.seed, {kUpdateStream, round, i})) < model.update_prob[i];
        if (!updates) {
            continue;
        }
        const std::span<const double> row(s.last_received.data() + i * m, m);
        next[i] = best_response(game.aggregate(i), others_sum(i, row));
        s.bid_round[i] = round;
        s.last_update[i] = round;
    }
    out.bids = BidVector(std::move(next));
    return out;
}

Solution run_async(const ChargingGame& game, const AsyncNetworkModel& model, const SolverSettings& settings) {
    settings.validate();
    model.validate(game.size());
    const std::uint64_t window = model.convergence_window();

    ConvergenceTrace trace;
    trace.iterates.push_back(initial_bids(game, settings.init));
    MailboxState state = MailboxState::broadcast(trace.iterates.back());

    for (int n = 1; n <= settings.max_iterations; ++n) {
        const auto round = static_cast<std::uint64_t>(n);
        AsyncStep step = step_async(state, trace.iterates.back(), model, game, round);
        const double residual = max_abs_diff(step.bids, trace.iterates.back());
        state = std::move(step.state);
        trace.iterates.push_back(std::move(step.bids));
        trace.residuals.push_back(residual);
        trace.iterations_used = n;

        if (round < window || residual >= settings.tolerance) {
            continue;
        }
        // A quiet round may only mean nobody heard anything new. Require the
        // whole window to be quiet, every mailbox to hold values within
        // tolerance of the senders' current bids, and every user to have
        // recomputed within the window.
        const auto& current = trace.iterates.back();
        const double drift = max_abs_diff(current, trace.iterates[trace.iterates.size() - 1 - window]);
        bool views_accurate = true;
        for (std::size_t i = 0; i < state.users && views_accurate; ++i) {
            for (std::size_t j = 0; j < state.users; ++j) {
                if (i != j && !(std::abs(state.known(i, j) - current[j]) < settings.tolerance)) {
                    views_accurate = false;
                    break;
                }
            }
        }
        const bool fresh = views_accurate && std::all_of(state.last_update.begin(), state.last_update.end(),
                                                         [&](std::uint64_t r) { return r + window > round; });
        if (drift < settings.tolerance && fresh) {
            trace.converged = true;
            break;
        }
    }
    fill_part_distances(trace);
    if (!trace.converged) {
        throw NonConvergence("asynchronous iteration did not settle within " +
                                 std::to_string(settings.max_iterations) + " rounds",
                             std::move(trace));
    }

    Solution sol;
    sol.bids = trace.iterates.back();
    sol.fixed_point_residual = max_abs_diff(sol.bids, joint_best_response(sol.bids, game));
    sol.trace = std::move(trace);
    return sol;
}

}  // namespace wcharge
