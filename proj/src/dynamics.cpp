#include "wcharge/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace wcharge {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

void SolverSettings::validate() const {
    if (!(tolerance > 0.0)) {
        throw std::invalid_argument("solver tolerance must be > 0");
    }
    if (max_iterations < 1) {
        throw std::invalid_argument("solver max_iterations must be >= 1");
    }
    std::visit(overloaded{
                   [](const HalfK&) {},
                   [](const ConstantInit& c) {
                       if (!(std::isfinite(c.value) && c.value > 0.0)) {
                           throw std::invalid_argument("constant initial bid must be > 0");
                       }
                   },
                   [](const ExplicitInit& e) { BidVector{e.bids}; },
                   [](const RandomUniformInit& r) {
                       if (!(r.lo > 0.0 && r.lo <= r.hi && std::isfinite(r.hi))) {
                           throw std::invalid_argument("random initial range must satisfy 0 < lo <= hi");
                       }
                   },
               },
               init);
}

BidVector initial_bids(const ChargingGame& game, const InitMode& init) {
    const std::size_t m = game.size();
    return std::visit(
        overloaded{
            [&](const HalfK&) {
                std::vector<double> x(game.aggregate().begin(), game.aggregate().end());
                for (auto& v : x) {
                    v *= 0.5;
                }
                return BidVector(std::move(x));
            },
            [&](const ConstantInit& c) { return BidVector::constant(m, c.value); },
            [&](const ExplicitInit& e) {
                BidVector x(e.bids);
                game.check_bids(x);
                return x;
            },
            [&](const RandomUniformInit& r) {
                std::mt19937_64 rng(r.seed);
                std::uniform_real_distribution<double> d(r.lo, r.hi);
                std::vector<double> x(m);
                for (auto& v : x) {
                    v = r.lo == r.hi ? r.lo : d(rng);
                }
                return BidVector(std::move(x));
            },
        },
        init);
}

BidVector iterate_sync(const BidVector& bids, const ChargingGame& game) {
    return joint_best_response(bids, game);
}

double max_abs_diff(const BidVector& a, const BidVector& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("bid vectors differ in length");
    }
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

double part_metric(const BidVector& x, const BidVector& y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("part metric needs vectors of equal length");
    }
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        d = std::max(d, std::abs(std::log(x[i] / y[i])));
    }
    return d;
}

void fill_part_distances(ConvergenceTrace& trace) {
    trace.part_distances.clear();
    if (trace.iterates.empty()) {
        return;
    }
    const BidVector& last = trace.iterates.back();
    for (const auto& x : trace.iterates) {
        trace.part_distances.push_back(part_metric(x, last));
    }
}

Solution solve_nash(const ChargingGame& game, const SolverSettings& settings) {
    settings.validate();
    ConvergenceTrace trace;
    trace.iterates.push_back(initial_bids(game, settings.init));

    for (int n = 1; n <= settings.max_iterations; ++n) {
        BidVector next = iterate_sync(trace.iterates.back(), game);
        const double residual = max_abs_diff(next, trace.iterates.back());
        trace.iterates.push_back(std::move(next));
        trace.residuals.push_back(residual);
        trace.iterations_used = n;
        if (residual < settings.tolerance) {
            trace.converged = true;
            break;
        }
    }
    fill_part_distances(trace);
    if (!trace.converged) {
        const double last = trace.residuals.back();
        throw NonConvergence("synchronous iteration did not reach tolerance " +
                                 std::to_string(settings.tolerance) + " in " +
                                 std::to_string(settings.max_iterations) +
                                 " iterations (last residual " + std::to_string(last) + ")",
                             std::move(trace));
    }

    Solution sol;
    sol.bids = trace.iterates.back();
    sol.fixed_point_residual = max_abs_diff(sol.bids, joint_best_response(sol.bids, game));
    sol.trace = std::move(trace);
    return sol;
}

double estimate_rate(const ConvergenceTrace& trace) {
    if (trace.iterates.size() < 4) {
        throw std::domain_error("estimate_rate needs a trace with at least 4 iterates");
    }
    double scale = 0.0;
    for (double v : trace.iterates.back()) {
        scale = std::max(scale, std::abs(v));
    }
    // Residuals at the round-off floor carry no rate information.
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * scale;

    std::vector<double> n;
    std::vector<double> logr;
    for (std::size_t k = 0; k < trace.residuals.size(); ++k) {
        if (trace.residuals[k] > floor) {
            n.push_back(static_cast<double>(k + 1));
            logr.push_back(std::log(trace.residuals[k]));
        }
    }
    if (n.size() < 3) {
        throw std::domain_error("estimate_rate: fewer than 3 residuals above round-off; slope undefined");
    }
    const double count = static_cast<double>(n.size());
    double mean_n = 0.0;
    double mean_r = 0.0;
    for (std::size_t k = 0; k < n.size(); ++k) {
        mean_n += n[k];
        mean_r += logr[k];
    }
    mean_n /= count;
    mean_r /= count;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t k = 0; k < n.size(); ++k) {
        sxy += (n[k] - mean_n) * (logr[k] - mean_r);
        sxx += (n[k] - mean_n) * (n[k] - mean_n);
    }
    return sxy / sxx;
}

const char* to_string(Monotonicity m) {
    switch (m) {
        case Monotonicity::Decreasing:
            return "decreasing";
        case Monotonicity::Increasing:
            return "increasing";
        case Monotonicity::NonMonotone:
            return "non-monotone";
    }
    return "?";
}

Monotonicity check_monotone(const ConvergenceTrace& trace) {
    bool decreasing = true;
    bool increasing = true;
    for (std::size_t k = 1; k < trace.iterates.size(); ++k) {
        const auto& prev = trace.iterates[k - 1];
        const auto& cur = trace.iterates[k];
        for (std::size_t i = 0; i < cur.size(); ++i) {
            if (cur[i] > prev[i]) {
                decreasing = false;
            }
            if (cur[i] < prev[i]) {
                increasing = false;
            }
        }
    }
    if (decreasing) {
        return Monotonicity::Decreasing;
    }
    return increasing ? Monotonicity::Increasing : Monotonicity::NonMonotone;
}

}  // namespace wcharge
