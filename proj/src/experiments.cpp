#include "wcharge/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "wcharge/oracle.hpp"
#include "wcharge/seeding.hpp"
#include "wcharge/welfare.hpp"

namespace wcharge {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, std::string_view seps) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const auto next = s.find_first_of(seps, pos);
        const auto piece = trim(s.substr(pos, next == std::string_view::npos ? s.npos : next - pos));
        if (!piece.empty()) {
            out.push_back(piece);
        }
        if (next == std::string_view::npos) {
            break;
        }
        pos = next + 1;
    }
    return out;
}

double parse_real(std::string_view key, std::string_view text) {
    double v = 0.0;
    const auto t = trim(text);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
        throw ConfigError("config key '" + std::string(key) + "': not a number: '" + std::string(text) + "'");
    }
    return v;
}

std::uint64_t parse_uint(std::string_view key, std::string_view text) {
    std::uint64_t v = 0;
    const auto t = trim(text);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
        throw ConfigError("config key '" + std::string(key) + "': not a non-negative integer: '" +
                          std::string(text) + "'");
    }
    return v;
}

int parse_int(std::string_view key, std::string_view text) {
    const auto v = parse_uint(key, text);
    if (v > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
        throw ConfigError("config key '" + std::string(key) + "': value too large");
    }
    return static_cast<int>(v);
}

std::vector<double> parse_reals(std::string_view key, std::string_view text) {
    std::vector<double> out;
    for (auto piece : split(text, ", \t")) {
        out.push_back(parse_real(key, piece));
    }
    if (out.empty()) {
        throw ConfigError("config key '" + std::string(key) + "': empty value");
    }
    return out;
}

ValueRange parse_range(std::string_view key, std::string_view text) {
    const auto v = parse_reals(key, text);
    if (v.size() != 2) {
        throw ConfigError("config key '" + std::string(key) + "': expected 'lo, hi'");
    }
    return {v[0], v[1]};
}

std::vector<std::size_t> parse_user_counts(std::string_view text) {
    const auto t = trim(text);
    if (const auto dots = t.find(".."); dots != std::string_view::npos) {
        const auto lo = parse_uint("user_count", t.substr(0, dots));
        const auto hi = parse_uint("user_count", t.substr(dots + 2));
        if (hi < lo) {
            throw ConfigError("config key 'user_count': empty range");
        }
        std::vector<std::size_t> out;
        for (auto m = lo; m <= hi; ++m) {
            out.push_back(static_cast<std::size_t>(m));
        }
        return out;
    }
    std::vector<std::size_t> out;
    for (auto piece : split(t, ", \t")) {
        out.push_back(static_cast<std::size_t>(parse_uint("user_count", piece)));
    }
    if (out.empty()) {
        throw ConfigError("config key 'user_count': empty value");
    }
    return out;
}

InitMode parse_init(std::string_view text) {
    const auto t = trim(text);
    const auto colon = t.find(':');
    const auto kind = trim(t.substr(0, colon));
    const auto rest = colon == std::string_view::npos ? std::string_view{} : t.substr(colon + 1);
    if (kind == "half_k" && rest.empty()) {
        return HalfK{};
    }
    if (kind == "constant") {
        return ConstantInit{parse_real("init_mode", rest)};
    }
    if (kind == "uniform") {
        const auto parts = split(rest, ":");
        if (parts.size() != 2 && parts.size() != 3) {
            throw ConfigError("config key 'init_mode': expected uniform:lo:hi[:seed]");
        }
        return RandomUniformInit{parse_real("init_mode", parts[0]), parse_real("init_mode", parts[1]),
                                 parts.size() == 3 ? parse_uint("init_mode", parts[2]) : 0};
    }
    if (kind == "explicit") {
        return ExplicitInit{parse_reals("init_mode", rest)};
    }
    throw ConfigError("config key 'init_mode': unknown mode '" + std::string(text) + "'");
}

std::string init_to_string(const InitMode& init) {
    if (std::holds_alternative<HalfK>(init)) {
        return "half_k";
    }
    if (const auto* c = std::get_if<ConstantInit>(&init)) {
        return "constant:" + format_double(c->value);
    }
    if (const auto* r = std::get_if<RandomUniformInit>(&init)) {
        return "uniform:" + format_double(r->lo) + ":" + format_double(r->hi) + ":" + std::to_string(r->seed);
    }
    std::string s = "explicit:";
    for (double v : std::get<ExplicitInit>(init).bids) {
        s += " " + format_double(v);
    }
    return s;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void ExperimentConfig::validate() const {
    auto positive = [](const char* key, double v) {
        if (!(v > 0.0)) {
            throw ConfigError(std::string("config key '") + key + "' must be > 0");
        }
    };
    positive("power_P", power);
    positive("lambda", lambda);
    if (!(demand_rate.lo > 0.0 && demand_rate.lo <= demand_rate.hi)) {
        throw ConfigError("config key 'demand_rate_range' must satisfy 0 < lo <= hi");
    }
    if (!(efficiency.lo > 0.0 && efficiency.lo <= efficiency.hi && efficiency.hi <= 1.0)) {
        throw ConfigError("config key 'efficiency_range' must satisfy 0 < lo <= hi <= 1");
    }
    if (user_counts.empty()) {
        throw ConfigError("config key 'user_count' is empty");
    }
    for (auto m : user_counts) {
        if (m < 2) {
            throw ConfigError("config key 'user_count': every game needs at least 2 users");
        }
    }
    if (delivery_prob.size() != 1) {
        if (user_counts.size() != 1 || delivery_prob.size() != user_counts.front() * user_counts.front()) {
            throw ConfigError("config key 'delivery_prob': a matrix needs a single user_count M and M*M values");
        }
    }
    for (std::size_t k = 0; k < delivery_prob.size(); ++k) {
        const bool diagonal = delivery_prob.size() > 1 && k % (user_counts.front() + 1) == 0;
        if (!diagonal && !(delivery_prob[k] > 0.0 && delivery_prob[k] <= 1.0)) {
            throw ConfigError("config key 'delivery_prob': probabilities must lie in (0, 1]");
        }
    }
    if (!(update_prob > 0.0 && update_prob <= 1.0)) {
        throw ConfigError("config key 'update_prob' must lie in (0, 1]");
    }
    if (trials < 1) {
        throw ConfigError("config key 'trials' must be >= 1");
    }
    if (verify_trials < 1) {
        throw ConfigError("config key 'verify_trials' must be >= 1");
    }
    if (!(box_lo > 0.0 && box_lo <= box_hi)) {
        throw ConfigError("config keys 'box_lo'/'box_hi' must satisfy 0 < box_lo <= box_hi");
    }
    try {
        solver.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (const auto* e = std::get_if<ExplicitInit>(&solver.init)) {
        for (auto m : user_counts) {
            if (e->bids.size() != m) {
                throw ConfigError("config key 'init_mode': explicit bids must match every user_count");
            }
        }
    }
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig c;
    std::map<std::string, int> seen;
    int line_no = 0;
    for (auto raw : split(text, "\n")) {
        ++line_no;
        auto line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = trim(line.substr(0, hash));
        }
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const auto value = trim(line.substr(eq + 1));
        if (seen[key]++ > 0) {
            throw ConfigError("config key '" + key + "' given twice");
        }
        if (key == "power_P") {
            c.power = parse_real(key, value);
        } else if (key == "lambda") {
            c.lambda = parse_real(key, value);
        } else if (key == "demand_rate_range") {
            c.demand_rate = parse_range(key, value);
        } else if (key == "efficiency_range") {
            c.efficiency = parse_range(key, value);
        } else if (key == "user_count") {
            c.user_counts = parse_user_counts(value);
        } else if (key == "delivery_prob") {
            c.delivery_prob = parse_reals(key, value);
        } else if (key == "update_prob") {
            c.update_prob = parse_real(key, value);
        } else if (key == "seed") {
            c.seed = parse_uint(key, value);
        } else if (key == "trials") {
            c.trials = parse_int(key, value);
        } else if (key == "tolerance") {
            c.solver.tolerance = parse_real(key, value);
        } else if (key == "max_iterations") {
            c.solver.max_iterations = parse_int(key, value);
        } else if (key == "init_mode") {
            c.solver.init = parse_init(value);
        } else if (key == "box_lo") {
            c.box_lo = parse_real(key, value);
        } else if (key == "box_hi") {
            c.box_hi = parse_real(key, value);
        } else if (key == "verify_trials") {
            c.verify_trials = parse_int(key, value);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string canonical_config(const ExperimentConfig& c) {
    auto reals = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            s += (i ? ", " : "") + format_double(v[i]);
        }
        return s;
    };
    std::string counts;
    for (std::size_t i = 0; i < c.user_counts.size(); ++i) {
        counts += (i ? ", " : "") + std::to_string(c.user_counts[i]);
    }
    std::ostringstream out;
    out << "power_P = " << format_double(c.power) << '\n'
        << "lambda = " << format_double(c.lambda) << '\n'
        << "demand_rate_range = " << format_double(c.demand_rate.lo) << ", " << format_double(c.demand_rate.hi)
        << '\n'
        << "efficiency_range = " << format_double(c.efficiency.lo) << ", " << format_double(c.efficiency.hi)
        << '\n'
        << "user_count = " << counts << '\n'
        << "delivery_prob = " << reals(c.delivery_prob) << '\n'
        << "update_prob = " << format_double(c.update_prob) << '\n'
        << "trials = " << c.trials << '\n'
        << "tolerance = " << format_double(c.solver.tolerance) << '\n'
        << "max_iterations = " << c.solver.max_iterations << '\n'
        << "init_mode = " << init_to_string(c.solver.init) << '\n'
        << "box_lo = " << format_double(c.box_lo) << '\n'
        << "box_hi = " << format_double(c.box_hi) << '\n'
        << "verify_trials = " << c.verify_trials << '\n';
    return out.str();
}

std::string config_hash(const ExperimentConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical_config(config)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::uint64_t trial_seed(const ExperimentConfig& config, std::size_t users, std::uint64_t trial) {
    return derive_seed(config.seed, {static_cast<std::uint64_t>(users), trial});
}

ChargingGame sample_game(const ExperimentConfig& config, std::size_t users, std::mt19937_64& rng) {
    auto draw = [&rng](ValueRange r) {
        if (r.lo == r.hi) {
            return r.lo;
        }
        return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
    };
    std::vector<UserProfile> profiles;
    profiles.reserve(users);
    for (std::size_t i = 0; i < users; ++i) {
        const double rate = draw(config.demand_rate);
        const double h = draw(config.efficiency);
        profiles.push_back({rate, 1.0, h});
    }
    return ChargingGame(config.power, config.lambda, std::move(profiles));
}

AsyncNetworkModel network_model(const ExperimentConfig& config, std::size_t users, std::uint64_t seed) {
    if (config.delivery_prob.size() == 1) {
        return AsyncNetworkModel::uniform(users, config.delivery_prob.front(), seed, config.update_prob);
    }
    if (config.delivery_prob.size() != users * users) {
        throw ConfigError("delivery_prob matrix does not match " + std::to_string(users) + " users");
    }
    AsyncNetworkModel model = AsyncNetworkModel::uniform(users, 1.0, seed, config.update_prob);
    model.delivery_prob = config.delivery_prob;
    return model;
}

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"convergence-sync",     "convergence-async", "iters-vs-size",
                                                "equilibrium-vs-users", "welfare-vs-users",  "poa-vs-users",
                                                "verify"};
    return names;
}

namespace {

class OutputFiles {
public:
    OutputFiles(std::string experiment, const ExperimentConfig& config, std::filesystem::path dir)
        : experiment_(std::move(experiment)), config_(config), dir_(std::move(dir)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) {
            throw std::runtime_error("cannot create output directory " + dir_.string() + ": " + ec.message());
        }
    }

    std::string preamble(const std::string& extra = {}) const {
        std::string s = "# experiment=" + experiment_ + " seed=" + std::to_string(config_.seed) +
                        " config_hash=" + config_hash(config_);
        if (!extra.empty()) {
            s += " " + extra;
        }
        return s + "\n";
    }

    void write(const std::string& name, const std::string& content, ExperimentOutcome& outcome) const {
        const auto path = dir_ / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << content;
        out.close();
        if (!out) {
            throw std::runtime_error("cannot write " + path.string());
        }
        outcome.files.push_back(path);
    }

    nlohmann::json summary(nlohmann::json aggregates) const {
        return {{"config_hash", config_hash(config_)},
                {"seed", config_.seed},
                {"experiment", experiment_},
                {"aggregates", std::move(aggregates)}};
    }

private:
    std::string experiment_;
    const ExperimentConfig& config_;
    std::filesystem::path dir_;
};

std::string trace_csv(const ConvergenceTrace& trace) {
    std::string s = "iter,user,bid,residual\n";
    for (std::size_t n = 0; n < trace.iterates.size(); ++n) {
        const std::string residual = n == 0 ? "" : format_double(trace.residuals[n - 1]);
        for (std::size_t i = 0; i < trace.iterates[n].size(); ++i) {
            s += std::to_string(n) + "," + std::to_string(i) + "," + format_double(trace.iterates[n][i]) + "," +
                 residual + "\n";
        }
    }
    return s;
}

struct SweepRow {
    std::size_t users;
    int trial;
    std::string metric;
    double value;
};

std::string sweep_csv(std::vector<SweepRow> rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.users != b.users) {
            return a.users < b.users;
        }
        if (a.trial != b.trial) {
            return a.trial < b.trial;
        }
        return a.metric < b.metric;
    });
    std::string s = "M,trial,metric,value\n";
    for (const auto& r : rows) {
        s += std::to_string(r.users) + "," + std::to_string(r.trial) + "," + r.metric + "," + format_double(r.value) +
             "\n";
    }
    return s;
}

// Per-(M, metric) mean over trials.
nlohmann::json sweep_means(const std::vector<SweepRow>& rows) {
    std::map<std::pair<std::string, std::size_t>, std::pair<double, int>> acc;
    for (const auto& r : rows) {
        auto& [sum, count] = acc[{r.metric, r.users}];
        sum += r.value;
        ++count;
    }
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [key, v] : acc) {
        out[key.first].push_back({{"M", key.second}, {"mean", v.first / v.second}, {"count", v.second}});
    }
    return out;
}

ExperimentOutcome run_convergence(const ExperimentConfig& config, const std::filesystem::path& dir, bool async) {
    const std::string name = async ? "convergence-async" : "convergence-sync";
    OutputFiles files(name, config, dir);
    ExperimentOutcome outcome;
    const std::size_t m = config.user_counts.front();
    const auto seed = trial_seed(config, m, 0);
    std::mt19937_64 rng(seed);
    const ChargingGame game = sample_game(config, m, rng);

    std::vector<std::pair<std::string, InitMode>> starts{{"configured", config.solver.init},
                                                         {"low", ConstantInit{1e-6}}};
    std::vector<double> ten_k;
    for (double k : game.aggregate()) {
        ten_k.push_back(10.0 * k);
    }
    starts.emplace_back("high", ExplicitInit{ten_k});

    nlohmann::json runs = nlohmann::json::array();
    for (std::size_t s = 0; s < starts.size(); ++s) {
        SolverSettings settings = config.solver;
        settings.init = starts[s].second;
        ConvergenceTrace trace;
        bool converged = true;
        try {
            trace = async ? run_async(game, network_model(config, m, derive_seed(seed, {1, s})), settings).trace
                          : solve_nash(game, settings).trace;
        } catch (const NonConvergence& e) {
            trace = e.trace();
            converged = false;
            outcome.exit_code = 2;
        }
        const std::string file = name + "-" + starts[s].first + ".csv";
        files.write(file, files.preamble("M=" + std::to_string(m) + " start=" + starts[s].first) + trace_csv(trace),
                    outcome);
        nlohmann::json run{{"start", starts[s].first},
                           {"iterations", trace.iterations_used},
                           {"converged", converged},
                           {"final_bids", std::vector<double>(trace.iterates.back().begin(), trace.iterates.back().end())},
                           {"monotonicity", to_string(check_monotone(trace))}};
        try {
            run["rate_slope"] = estimate_rate(trace);
        } catch (const std::domain_error&) {
            run["rate_slope"] = nullptr;
        }
        runs.push_back(std::move(run));
    }
    outcome.summary = files.summary({{"M", m}, {"runs", runs}});
    files.write(name + ".json", outcome.summary.dump(2) + "\n", outcome);
    return outcome;
}

// Runs `per_trial` for every (M, trial) and writes the sweep CSV and summary.
template <class PerTrial>
ExperimentOutcome run_sweep(const std::string& name, const ExperimentConfig& config, const std::filesystem::path& dir,
                            PerTrial per_trial) {
    OutputFiles files(name, config, dir);
    ExperimentOutcome outcome;
    std::vector<SweepRow> rows;
    int failures = 0;
    for (std::size_t m : config.user_counts) {
        for (int t = 0; t < config.trials; ++t) {
            const auto seed = trial_seed(config, m, static_cast<std::uint64_t>(t));
            std::mt19937_64 rng(seed);
            const ChargingGame game = sample_game(config, m, rng);
            try {
                for (auto& [metric, value] : per_trial(game, seed)) {
                    rows.push_back({m, t, metric, value});
                }
            } catch (const NonConvergence&) {
                ++failures;
                outcome.exit_code = 2;
            }
        }
    }
    auto aggregates = sweep_means(rows);
    aggregates["non_converged_trials"] = failures;
    outcome.summary = files.summary(std::move(aggregates));
    files.write(name + ".csv", files.preamble() + sweep_csv(std::move(rows)), outcome);
    files.write(name + ".json", outcome.summary.dump(2) + "\n", outcome);
    return outcome;
}

using Metrics = std::vector<std::pair<std::string, double>>;

ExperimentOutcome run_verify(const ExperimentConfig& config, const std::filesystem::path& dir) {
    OutputFiles files("verify", config, dir);
    ExperimentOutcome outcome;
    std::vector<SweepRow> rows;

    const auto battery = property_battery(desk_sampler(2, 8), config.verify_trials, config.seed);

    int oracle_failures = 0;
    int curvature_failures = 0;
    double worst_gap = 0.0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t m = config.user_counts[static_cast<std::size_t>(t) % config.user_counts.size()];
        std::mt19937_64 rng(derive_seed(config.seed, {2, static_cast<std::uint64_t>(t)}));
        const ChargingGame game = sample_game(config, m, rng);
        std::uniform_real_distribution<double> bid(1e-3 * game.max_aggregate(), game.max_aggregate());
        std::vector<double> x(m);
        for (auto& v : x) {
            v = bid(rng);
        }
        const BidVector bids(x);
        const std::size_t i = static_cast<std::size_t>(t) % m;
        double gap = INFINITY;
        try {
            gap = std::abs(brute_force_best_response(i, bids, game) - best_response(i, bids, game));
        } catch (const OracleRangeError&) {
        }
        worst_gap = std::max(worst_gap, gap);
        oracle_failures += gap < 1e-5 ? 0 : 1;
        rows.push_back({m, t, "oracle_gap", gap});
    }
    for (int t = 0; t < 1000; ++t) {
        const std::size_t m = config.user_counts[static_cast<std::size_t>(t) % config.user_counts.size()];
        std::mt19937_64 rng(derive_seed(config.seed, {3, static_cast<std::uint64_t>(t)}));
        const ChargingGame game = sample_game(config, m, rng);
        std::uniform_real_distribution<double> bid(1e-3, 1.0);
        std::vector<double> x(m);
        for (auto& v : x) {
            v = bid(rng);
        }
        const BidVector bids(x);
        const std::size_t i = static_cast<std::size_t>(t) % m;
        const double curvature = utility_curvature_check(i, bids, game, 1e-4 * bids[i]);
        curvature_failures += curvature < 0.0 ? 0 : 1;
        rows.push_back({m, t, "curvature", curvature});
    }

    const bool passed = battery.passed() && oracle_failures == 0 && curvature_failures == 0;
    outcome.exit_code = passed ? 0 : 3;
    outcome.summary = files.summary({{"passed", passed},
                                     {"property_battery", to_json(battery)},
                                     {"oracle_instances", 100},
                                     {"oracle_failures", oracle_failures},
                                     {"oracle_worst_gap", worst_gap},
                                     {"curvature_points", 1000},
                                     {"curvature_failures", curvature_failures}});
    files.write("verify.csv", files.preamble() + sweep_csv(std::move(rows)), outcome);
    files.write("verify.json", outcome.summary.dump(2) + "\n", outcome);
    return outcome;
}

}  // namespace

ExperimentOutcome run_experiment(std::string_view name, const ExperimentConfig& config,
                                 const std::filesystem::path& out_dir) {
    config.validate();
    if (name == "convergence-sync") {
        return run_convergence(config, out_dir, false);
    }
    if (name == "convergence-async") {
        return run_convergence(config, out_dir, true);
    }
    if (name == "iters-vs-size") {
        return run_sweep("iters-vs-size", config, out_dir, [&](const ChargingGame& game, std::uint64_t seed) {
            const auto sync = solve_nash(game, config.solver);
            const auto async = run_async(game, network_model(config, game.size(), derive_seed(seed, {1})), config.solver);
            return Metrics{{"sync_iterations", sync.trace.iterations_used},
                           {"async_iterations", async.trace.iterations_used}};
        });
    }
    if (name == "equilibrium-vs-users") {
        return run_sweep("equilibrium-vs-users", config, out_dir, [&](const ChargingGame& game, std::uint64_t) {
            const auto sol = solve_nash(game, config.solver);
            const auto [lo, hi] = std::minmax_element(sol.bids.begin(), sol.bids.end());
            return Metrics{{"mean_equilibrium_bid", sol.bids.sum() / static_cast<double>(game.size())},
                           {"min_equilibrium_bid", *lo},
                           {"max_equilibrium_bid", *hi}};
        });
    }
    if (name == "welfare-vs-users") {
        return run_sweep("welfare-vs-users", config, out_dir, [&](const ChargingGame& game, std::uint64_t) {
            const auto sol = solve_nash(game, config.solver);
            return Metrics{{"welfare", social_welfare(sol.bids, game)}};
        });
    }
    if (name == "poa-vs-users") {
        return run_sweep("poa-vs-users", config, out_dir, [&](const ChargingGame& game, std::uint64_t) {
            return Metrics{{"poa", price_of_anarchy(game, config.solver)}};
        });
    }
    if (name == "verify") {
        return run_verify(config, out_dir);
    }
    throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

nlohmann::json solve_instance(const ExperimentConfig& config) {
    config.validate();
    const std::size_t m = config.user_counts.front();
    const auto seed = trial_seed(config, m, 0);
    std::mt19937_64 rng(seed);
    const ChargingGame game = sample_game(config, m, rng);
    const auto report = welfare_report(game, config.solver, config.box_lo, config.box_hi);
    const auto sol = solve_nash(game, config.solver);

    nlohmann::json users = nlohmann::json::array();
    const auto alloc = allocation_report(sol.bids, game);
    for (std::size_t i = 0; i < m; ++i) {
        users.push_back({{"demand_rate", game.users()[i].demand / game.users()[i].deadline},
                         {"efficiency", game.efficiency(i)},
                         {"K", game.aggregate(i)},
                         {"bid", sol.bids[i]},
                         {"received_power", alloc.received_power[i]},
                         {"satisfaction", alloc.satisfaction[i]},
                         {"utility", alloc.utility[i]}});
    }
    return {{"config_hash", config_hash(config)},
            {"seed", config.seed},
            {"experiment", "solve"},
            {"aggregates",
             {{"M", m},
              {"iterations", sol.trace.iterations_used},
              {"fixed_point_residual", sol.fixed_point_residual},
              {"users", users},
              {"equilibrium_welfare", report.equilibrium_welfare},
              {"cooperative_supremum", report.cooperative_supremum},
              {"constrained_optimum", report.constrained.value},
              {"constrained_argmax",
               std::vector<double>(report.constrained.argmax.begin(), report.constrained.argmax.end())},
              {"constrained_stalled", report.constrained.stalled},
              {"poa", report.poa}}}};
}

}  // namespace wcharge
