#ifndef WCHARGE_GAME_HPP
#define WCHARGE_GAME_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace wcharge {

/// One charging user. Only the ratio deadline/demand and the link
/// efficiency ever reach the game dynamics, through ChargingGame::aggregate().
struct UserProfile {
    double demand = 1.0;      ///< energy still needed, J
    double deadline = 1.0;    ///< time left in the charging area, s
    double efficiency = 1.0;  ///< end-to-end power transfer efficiency, (0, 1]

    /// Throws std::invalid_argument if any field is out of range.
    void validate() const;
};

/// Strictly positive unit-price bids, one per user.
class BidVector {
public:
    BidVector() = default;

    /// Rejects empty input and any component that is not finite and > 0.
    explicit BidVector(std::vector<double> bids);

    static BidVector constant(std::size_t users, double value);

    std::size_t size() const noexcept { return bids_.size(); }
    double operator[](std::size_t i) const { return bids_[i]; }
    std::span<const double> values() const noexcept { return bids_; }
    auto begin() const noexcept { return bids_.begin(); }
    auto end() const noexcept { return bids_.end(); }

    double sum() const noexcept;

    friend bool operator==(const BidVector&, const BidVector&) = default;

private:
    std::vector<double> bids_;
};

/// A game instance: one transmitter of power P shared by M >= 2 users.
///
/// The per-user aggregate K_i = D_i h_i / (lambda C_i) is computed once at
/// construction. Everything downstream (best responses, utilities, welfare)
/// reads K, P, lambda and h only.
class ChargingGame {
public:
    ChargingGame(double transmit_power, double price_weight, std::vector<UserProfile> users);

    std::size_t size() const noexcept { return users_.size(); }
    double transmit_power() const noexcept { return transmit_power_; }
    double price_weight() const noexcept { return price_weight_; }
    std::span<const UserProfile> users() const noexcept { return users_; }
    std::span<const double> aggregate() const noexcept { return aggregate_; }
    double aggregate(std::size_t i) const { return aggregate_.at(i); }
    double max_aggregate() const noexcept;
    double efficiency(std::size_t i) const { return users_.at(i).efficiency; }

    ChargingGame with_transmit_power(double transmit_power) const;
    ChargingGame with_price_weight(double price_weight) const;

    /// Throws std::invalid_argument unless bids has one entry per user.
    void check_bids(const BidVector& bids) const;

private:
    double transmit_power_;
    double price_weight_;
    std::vector<UserProfile> users_;
    std::vector<double> aggregate_;
};

struct AllocationReport {
    std::vector<double> received_power;  ///< W
    std::vector<double> satisfaction;    ///< received power over C_i / D_i
    std::vector<double> utility;
};

/// Proportional share: y_i = x_i P h_i / sum_j x_j.
std::vector<double> allocate_power(const BidVector& bids, const ChargingGame& game);

AllocationReport allocation_report(const BidVector& bids, const ChargingGame& game);

/// U_i = lambda P (K_i x_i - x_i^2) / sum_j x_j.
double utility(std::size_t user, const BidVector& bids, const ChargingGame& game);

/// Utility of `user` if it bid `own_bid` while the others' bids sum to
/// `others_sum`. Used by line searches that vary one coordinate.
double utility_at(std::size_t user, double own_bid, double others_sum, const ChargingGame& game);

/// Maximizer of the concave utility for aggregate `k` when the opponents'
/// bids sum to `others_sum`; always in (0, k/2).
double best_response(double k, double others_sum);

double best_response(std::size_t user, const BidVector& bids, const ChargingGame& game);

/// All users best-respond to the same input vector (Jacobi sweep).
BidVector joint_best_response(const BidVector& bids, const ChargingGame& game);

/// Centered second difference of U_user in its own bid. Negative for every
/// valid input; throws std::invalid_argument unless 0 < step < x_user.
double utility_curvature_check(std::size_t user, const BidVector& bids, const ChargingGame& game,
                               double step);

/// Sum of all values except `user`, accumulated without subtraction:
/// ascending over j < user plus descending over j > user. Every best
/// response in the library sums opponents in this order, so synchronous and
/// asynchronous runs agree bit for bit when nothing is lost.
double others_sum(std::size_t user, std::span<const double> values);
double others_sum(std::size_t user, const BidVector& bids);

}  // namespace wcharge

#endif  // WCHARGE_GAME_HPP
