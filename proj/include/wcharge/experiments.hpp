#ifndef WCHARGE_EXPERIMENTS_HPP
#define WCHARGE_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wcharge/async_sim.hpp"
#include "wcharge/dynamics.hpp"
#include "wcharge/game.hpp"

namespace wcharge {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ValueRange {
    double lo;
    double hi;
};

/// Experiment parameters. Config files are flat `key = value` lines with `#`
/// comments; unknown keys are rejected.
///
///   power_P            = 20            W
///   lambda             = 1
///   demand_rate_range  = 1, 3          C/D in W
///   efficiency_range   = 0.11, 0.19
///   user_count         = 2..10         or 5, or 2, 4, 8
///   delivery_prob      = 0.8           or M*M row-major values (one user_count)
///   update_prob        = 1.0
///   seed               = 1
///   trials             = 1000
///   tolerance          = 1e-9
///   max_iterations     = 10000
///   init_mode          = half_k        constant:c | uniform:lo:hi[:seed] | explicit:v1 v2 ...
///   box_lo, box_hi     = 1e-3, 1       compact box for the constrained optimum
///   verify_trials      = 10000         property battery size for `verify`
struct ExperimentConfig {
    double power = 20.0;
    double lambda = 1.0;
    ValueRange demand_rate{1.0, 3.0};
    ValueRange efficiency{0.11, 0.19};
    std::vector<std::size_t> user_counts{2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<double> delivery_prob{0.8};
    double update_prob = 1.0;
    std::uint64_t seed = 1;
    int trials = 1000;
    SolverSettings solver;
    double box_lo = 1e-3;
    double box_hi = 1.0;
    int verify_trials = 10000;

    /// Throws ConfigError.
    void validate() const;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// key=value lines in a fixed order with 17-digit values; the seed is left out.
std::string canonical_config(const ExperimentConfig& config);

/// 64-bit FNV-1a of canonical_config, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Seed for trial `trial` of the sweep point with `users` users.
std::uint64_t trial_seed(const ExperimentConfig& config, std::size_t users, std::uint64_t trial);

/// C_i/D_i and h_i drawn uniformly and independently per user; D_i = 1 s and
/// C_i equals the drawn rate numerically.
ChargingGame sample_game(const ExperimentConfig& config, std::size_t users, std::mt19937_64& rng);

/// Delivery model for an M-user game from the configured scalar or matrix.
AsyncNetworkModel network_model(const ExperimentConfig& config, std::size_t users, std::uint64_t seed);

/// 17 significant digits.
std::string format_double(double v);

const std::vector<std::string>& experiment_names();

struct ExperimentOutcome {
    int exit_code = 0;  ///< 0 ok, 2 non-convergence in some trial, 3 verification failure
    std::vector<std::filesystem::path> files;
    nlohmann::json summary;
};

/// Runs one named experiment and writes its CSV and JSON files into `out_dir`.
/// Throws std::invalid_argument for an unknown name and std::runtime_error if
/// the output cannot be written.
ExperimentOutcome run_experiment(std::string_view name, const ExperimentConfig& config,
                                 const std::filesystem::path& out_dir);

/// Solves one sampled instance (first user_count): equilibrium, welfare, PoA.
nlohmann::json solve_instance(const ExperimentConfig& config);

}  // namespace wcharge

#endif  // WCHARGE_EXPERIMENTS_HPP
