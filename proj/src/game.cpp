#include "wcharge/game.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace wcharge {

void UserProfile::validate() const {
    if (!(std::isfinite(demand) && demand > 0.0)) {
        throw std::invalid_argument("user demand must be finite and > 0");
    }
    if (!(std::isfinite(deadline) && deadline > 0.0)) {
        throw std::invalid_argument("user deadline must be finite and > 0");
    }
    if (!(efficiency > 0.0 && efficiency <= 1.0)) {
        throw std::invalid_argument("user efficiency must lie in (0, 1]");
    }
}

BidVector::BidVector(std::vector<double> bids) : bids_(std::move(bids)) {
    if (bids_.empty()) {
        throw std::invalid_argument("bid vector is empty");
    }
    for (std::size_t i = 0; i < bids_.size(); ++i) {
        if (!(std::isfinite(bids_[i]) && bids_[i] > 0.0)) {
            throw std::invalid_argument("bid " + std::to_string(i) + " must be finite and > 0");
        }
    }
}

BidVector BidVector::constant(std::size_t users, double value) {
    return BidVector(std::vector<double>(users, value));
}

double BidVector::sum() const noexcept {
    return std::accumulate(bids_.begin(), bids_.end(), 0.0);
}

ChargingGame::ChargingGame(double transmit_power, double price_weight, std::vector<UserProfile> users)
    : transmit_power_(transmit_power), price_weight_(price_weight), users_(std::move(users)) {
    if (!(std::isfinite(transmit_power_) && transmit_power_ > 0.0)) {
        throw std::invalid_argument("transmit power must be finite and > 0");
    }
    if (!(std::isfinite(price_weight_) && price_weight_ > 0.0)) {
        throw std::invalid_argument("price weight must be finite and > 0");
    }
    if (users_.size() < 2) {
        throw std::invalid_argument("a charging game needs at least two users");
    }
    aggregate_.reserve(users_.size());
    for (const auto& u : users_) {
        u.validate();
        const double k = u.deadline * u.efficiency / (price_weight_ * u.demand);
        if (!(std::isfinite(k) && k > 0.0)) {
            throw std::invalid_argument("user aggregate K is not a finite positive number");
        }
        aggregate_.push_back(k);
    }
}

double ChargingGame::max_aggregate() const noexcept {
    return *std::max_element(aggregate_.begin(), aggregate_.end());
}

ChargingGame ChargingGame::with_transmit_power(double transmit_power) const {
    return ChargingGame(transmit_power, price_weight_, users_);
}

ChargingGame ChargingGame::with_price_weight(double price_weight) const {
    return ChargingGame(transmit_power_, price_weight, users_);
}

void ChargingGame::check_bids(const BidVector& bids) const {
    if (bids.size() != users_.size()) {
        throw std::invalid_argument("bid vector has " + std::to_string(bids.size()) +
                                    " entries, game has " + std::to_string(users_.size()) + " users");
    }
}

namespace {

void check_user(std::size_t user, const ChargingGame& game) {
    if (user >= game.size()) {
        throw std::out_of_range("user index " + std::to_string(user) + " out of range");
    }
}

}  // namespace

std::vector<double> allocate_power(const BidVector& bids, const ChargingGame& game) {
    game.check_bids(bids);
    const double total = bids.sum();
    std::vector<double> power(bids.size());
    for (std::size_t i = 0; i < bids.size(); ++i) {
        power[i] = bids[i] * game.transmit_power() * game.efficiency(i) / total;
    }
    return power;
}

AllocationReport allocation_report(const BidVector& bids, const ChargingGame& game) {
    AllocationReport report;
    report.received_power = allocate_power(bids, game);
    const auto users = game.users();
    for (std::size_t i = 0; i < users.size(); ++i) {
        report.satisfaction.push_back(report.received_power[i] / (users[i].demand / users[i].deadline));
        report.utility.push_back(utility(i, bids, game));
    }
    return report;
}

double utility_at(std::size_t user, double own_bid, double others_sum, const ChargingGame& game) {
    const double k = game.aggregate(user);
    return game.price_weight() * game.transmit_power() * (k * own_bid - own_bid * own_bid) /
           (own_bid + others_sum);
}

double utility(std::size_t user, const BidVector& bids, const ChargingGame& game) {
    game.check_bids(bids);
    check_user(user, game);
    const double k = game.aggregate(user);
    const double x = bids[user];
    return game.price_weight() * game.transmit_power() * (k * x - x * x) / bids.sum();
}

double others_sum(std::size_t user, std::span<const double> values) {
    double below = 0.0;
    for (std::size_t j = 0; j < user && j < values.size(); ++j) {
        below += values[j];
    }
    double above = 0.0;
    for (std::size_t j = values.size(); j > user + 1; --j) {
        above += values[j - 1];
    }
    return below + above;
}

double others_sum(std::size_t user, const BidVector& bids) {
    return others_sum(user, bids.values());
}

double best_response(double k, double others_sum) {
    if (!(others_sum > 0.0)) {
        throw std::invalid_argument("best response needs a positive opponent bid sum");
    }
    if (!(k > 0.0)) {
        throw std::invalid_argument("best response needs a positive aggregate K");
    }
    // sqrt(S^2 + K S) - S rewritten as K / (sqrt(1 + K/S) + 1): no subtraction,
    // so it is accurate for both S >> K and S << K.
    return k / (std::sqrt(1.0 + k / others_sum) + 1.0);
}

double best_response(std::size_t user, const BidVector& bids, const ChargingGame& game) {
    game.check_bids(bids);
    check_user(user, game);
    return best_response(game.aggregate(user), others_sum(user, bids));
}

BidVector joint_best_response(const BidVector& bids, const ChargingGame& game) {
    game.check_bids(bids);
    const std::size_t m = bids.size();
    // prefix[i] = x_0 + ... + x_{i-1}, suffix[i] = x_i + ... + x_{m-1}
    std::vector<double> prefix(m + 1, 0.0);
    std::vector<double> suffix(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        prefix[i + 1] = prefix[i] + bids[i];
        suffix[m - 1 - i] = suffix[m - i] + bids[m - 1 - i];
    }
    std::vector<double> next(m);
    for (std::size_t i = 0; i < m; ++i) {
        next[i] = best_response(game.aggregate(i), prefix[i] + suffix[i + 1]);
    }
    return BidVector(std::move(next));
}

double utility_curvature_check(std::size_t user, const BidVector& bids, const ChargingGame& game,
                               double step) {
    game.check_bids(bids);
    check_user(user, game);
    const double x = bids[user];
    if (!(step > 0.0) || !(x - step > 0.0)) {
        throw std::invalid_argument("curvature step must satisfy 0 < step < bid");
    }
    const double s = others_sum(user, bids);
    const double up = utility_at(user, x + step, s, game);
    const double mid = utility_at(user, x, s, game);
    const double down = utility_at(user, x - step, s, game);
    return (up - 2.0 * mid + down) / (step * step);
}

}  // namespace wcharge
