#include "app.hpp"

#include "gsf/csv.hpp"
#include "gsf/error.hpp"
#include "gsf/metrics.hpp"
#include "gsf/trajectory_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <deque>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>
#include <unistd.h>

#ifndef GSF_VERSION
#define GSF_VERSION "unknown"
#endif

namespace gsf::app {

namespace {

// config-file key -> long option name
const std::map<std::string, std::string, std::less<>>& config_keys() {
    static const std::map<std::string, std::string, std::less<>> keys{
        {"model.id", "model"},           {"model.c", "c"},
        {"model.kl", "kl"},              {"model.scenario", "scenario"},
        {"bench.n_runs", "runs"},        {"bench.n_steps", "steps"},
        {"bench.seed", "seed"},          {"bench.threads", "threads"},
        {"bench.schemes", "schemes"},    {"bench.pkg_gains", "pkg-gains"},
        {"bench.error", "error"},        {"bench.prior_var", "prior-var"},
        {"bench.x0", "x0"},              {"grid.dt_ticks", "dt-ticks"},
        {"calibrate.tol", "tol"},        {"calibrate.samples", "samples"},
        {"gains.steady", "steady"},      {"gains.preloaded", "preloaded"},
        {"gains.horizon", "horizon"},    {"input.path", "input"},
        {"output.dir", "output"},
    };
    return keys;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

// Turns a config file into `--option=value` arguments for `sub`.
std::vector<std::string> config_file_args(const std::filesystem::path& path,
                                          const CLI::App& sub) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open config file " + path.string());
    }
    std::vector<std::string> out;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        const std::string body = trim(line.substr(0, line.find('#')));
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        const std::string where = path.string() + ":" + std::to_string(n) + ": ";
        if (eq == std::string::npos) {
            throw UsageError(where + "expected 'key = value'");
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        const auto it = config_keys().find(key);
        if (it == config_keys().end()) {
            throw UsageError(where + "unknown key '" + key + "'");
        }
        if (sub.get_option_no_throw("--" + it->second) == nullptr) {
            throw UsageError(where + "key '" + key + "' does not apply to " + sub.get_name());
        }
        out.push_back("--" + it->second + "=" + value);
    }
    return out;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

std::vector<double> parse_reals(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) {
        const auto v = csv::parse_double(item);
        if (!v || !std::isfinite(*v)) {
            throw UsageError(flag + ": '" + item + "' is not a number");
        }
        out.push_back(*v);
    }
    if (out.empty()) {
        throw UsageError(flag + ": expected at least one value");
    }
    return out;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) {
        out += (out.empty() ? "" : ",") + s;
    }
    return out;
}

std::string join(const std::vector<double>& values) {
    std::vector<std::string> items;
    for (double v : values) {
        items.push_back(csv::format_double(v));
    }
    return join(items);
}

struct Flags {
    std::string config;
    int model = 0;
    std::string c;
    std::string kl;
    std::string scenario;
    std::string schemes;
    std::string x0;
    std::string error = "position";
    std::string pkg_gains = "per-model";
    std::string input;
    std::string output;
    bool steady = false;
    bool preloaded = false;
};

void add_source_options(CLI::App& sub, Flags& f, RunConfig& cfg) {
    auto* model = sub.add_option("--model", f.model, "Synthetic model 1, 2 or 3")
                      ->check(CLI::Range(1, 3));
    auto* c = sub.add_option("--c", f.c, "Mean separation c (comma list for a sweep)");
    auto* kl = sub.add_option("--kl", f.kl, "Target KL; c is calibrated (comma list for a sweep)");
    auto* scenario = sub.add_option("--scenario", f.scenario, "Packaged scenario: table2-x, table2-y");
    c->excludes(kl);
    scenario->excludes(model)->excludes(c)->excludes(kl);
    sub.add_option("--tol", cfg.kl_tol, "KL tolerance when calibrating c")
        ->check(CLI::PositiveNumber);
    sub.add_option("--samples", cfg.kl_samples, "Monte-Carlo samples per KL estimate")
        ->check(CLI::PositiveNumber);
}

void add_filter_options(CLI::App& sub, Flags& f, RunConfig& cfg) {
    sub.add_option("--schemes", f.schemes,
                   "Comma list of kalman, merge, remove, matched, proposed:{gsfm,gsfr,pkg,ssg,dkg}");
    sub.add_option("--x0", f.x0, "Initial state 'pos,vel'");
    sub.add_option("--prior-var", cfg.prior_var, "Initial prior variance")
        ->check(CLI::NonNegativeNumber);
    sub.add_option("--error", f.error, "Error component")
        ->check(CLI::IsMember({"position", "velocity"}));
    sub.add_option("--pkg-gains", f.pkg_gains, "Red-PKG offline gains")
        ->check(CLI::IsMember({"per-model", "shared"}));
}

void add_common_options(CLI::App& sub, Flags& f, RunConfig& cfg) {
    sub.add_option("--config", f.config, "Flat 'section.key = value' config file");
    sub.add_option("--seed", cfg.seed, "Random seed");
    sub.add_option("--output", f.output, "Output directory (default $GSF_OUTPUT_DIR or .)");
}

void resolve_source(RunConfig& cfg, const Flags& f, bool allow_sweep) {
    if (!f.scenario.empty()) {
        if (f.scenario != "table2-x" && f.scenario != "table2-y") {
            throw UsageError("--scenario: unknown scenario '" + f.scenario +
                             "' (expected table2-x or table2-y)");
        }
        cfg.scenario = f.scenario;
        return;
    }
    if (f.model == 0) {
        throw UsageError("give --model with --c or --kl, or --scenario");
    }
    cfg.model_id = f.model;
    if (f.c.empty() == f.kl.empty()) {
        throw UsageError("exactly one of --c and --kl is required with --model");
    }
    if (!f.c.empty()) {
        cfg.c_values = parse_reals(f.c, "--c");
        for (double c : cfg.c_values) {
            if (c < 0.0) {
                throw UsageError("--c: values must be nonnegative");
            }
        }
    } else {
        cfg.kl_targets = parse_reals(f.kl, "--kl");
        for (double kl : cfg.kl_targets) {
            if (!(kl > 0.0)) {
                throw UsageError("--kl: targets must be positive");
            }
        }
    }
    if (!allow_sweep && cfg.c_values.size() + cfg.kl_targets.size() != 1) {
        throw UsageError("this command takes a single --c or --kl value");
    }
}

void resolve_filter(RunConfig& cfg, const Flags& f) {
    cfg.schemes = f.schemes.empty() ? all_method_ids() : split_list(f.schemes);
    if (cfg.schemes.empty()) {
        throw UsageError("--schemes: expected at least one scheme");
    }
    for (const auto& s : cfg.schemes) {
        if (s == "kalman") {
            continue;
        }
        try {
            (void)parse_scheme_id(s);
        } catch (const InvalidArgument& e) {
            throw UsageError("--schemes: " + std::string(e.what()));
        }
    }
    if (!f.x0.empty()) {
        const auto v = parse_reals(f.x0, "--x0");
        if (v.size() != 2) {
            throw UsageError("--x0: expected 'pos,vel'");
        }
        cfg.x0 = Eigen::Vector2d(v[0], v[1]);
    }
    cfg.velocity_error = f.error == "velocity";
    cfg.pkg_gains = f.pkg_gains == "shared" ? PkgGainMode::shared : PkgGainMode::per_model;
}

}  // namespace

std::string_view to_string(Command c) {
    switch (c) {
        case Command::run_synthetic: return "run-synthetic";
        case Command::run_file: return "run-file";
        case Command::calibrate: return "calibrate";
        case Command::gains: return "gains";
        case Command::simulate: return "simulate";
    }
    return "?";
}

RunConfig parse_config(const std::vector<std::string>& args) {
    RunConfig cfg;
    Flags f;
    CLI::App app{"Gaussian sum filter benchmarks", "gsf"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);

    auto* synth = app.add_subcommand("run-synthetic", "Monte-Carlo comparison on a simulated model");
    add_common_options(*synth, f, cfg);
    add_source_options(*synth, f, cfg);
    add_filter_options(*synth, f, cfg);
    synth->add_option("--runs", cfg.n_runs, "Monte-Carlo runs")->check(CLI::PositiveNumber);
    synth->add_option("--steps", cfg.n_steps, "Steps per run")->check(CLI::PositiveNumber);
    synth->add_option("--dt-ticks", cfg.dt_ticks, "Sampling interval in 0.1080 s ticks")
        ->check(CLI::PositiveNumber);
    synth->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::PositiveNumber);

    auto* file = app.add_subcommand("run-file", "Filter a recorded trajectory CSV");
    add_common_options(*file, f, cfg);
    add_source_options(*file, f, cfg);
    add_filter_options(*file, f, cfg);
    file->add_option("--input", f.input, "Trajectory CSV")->required();

    auto* calib = app.add_subcommand("calibrate", "Find c for a target KL divergence");
    add_common_options(*calib, f, cfg);
    calib->add_option("--model", f.model, "Synthetic model 1, 2 or 3")
        ->check(CLI::Range(1, 3))
        ->required();
    calib->add_option("--kl", f.kl, "Target KL (comma list allowed)")->required();
    calib->add_option("--tol", cfg.kl_tol, "KL tolerance")->check(CLI::PositiveNumber);
    calib->add_option("--samples", cfg.kl_samples, "Monte-Carlo samples per KL estimate")
        ->check(CLI::PositiveNumber);

    auto* gains = app.add_subcommand("gains", "Offline Kalman gains of the filter bank");
    add_common_options(*gains, f, cfg);
    add_source_options(*gains, f, cfg);
    auto* steady = gains->add_flag("--steady", f.steady, "Per-model steady-state gains");
    auto* preloaded = gains->add_flag("--preloaded", f.preloaded, "Preloaded gain schedules");
    steady->excludes(preloaded);
    gains->add_option("--horizon", cfg.horizon, "Preloaded schedule length")
        ->check(CLI::PositiveNumber);
    gains->add_option("--prior-var", cfg.prior_var, "Initial prior variance")
        ->check(CLI::NonNegativeNumber);
    gains->add_option("--pkg-gains", f.pkg_gains, "Preloaded gains per model or shared")
        ->check(CLI::IsMember({"per-model", "shared"}));
    gains->add_option("--dt-ticks", cfg.dt_ticks, "Sampling interval in 0.1080 s ticks")
        ->check(CLI::PositiveNumber);

    auto* sim = app.add_subcommand("simulate", "Write a simulated trajectory CSV");
    add_common_options(*sim, f, cfg);
    add_source_options(*sim, f, cfg);
    sim->add_option("--steps", cfg.n_steps, "Steps")->check(CLI::PositiveNumber);
    sim->add_option("--dt-ticks", cfg.dt_ticks, "Sampling interval in 0.1080 s ticks")
        ->check(CLI::PositiveNumber);
    sim->add_option("--x0", f.x0, "Initial state 'pos,vel'");

    // config-file values go in front so that command-line flags override them
    std::vector<std::string> argv = args;
    if (!argv.empty()) {
        if (CLI::App* sub = app.get_subcommand_no_throw(argv.front())) {
            std::optional<std::string> config_path;
            for (std::size_t n = 1; n < argv.size(); ++n) {
                if (argv[n] == "--config" && n + 1 < argv.size()) {
                    config_path = argv[n + 1];
                } else if (argv[n].starts_with("--config=")) {
                    config_path = argv[n].substr(9);
                }
            }
            if (config_path) {
                const auto extra = config_file_args(*config_path, *sub);
                argv.insert(argv.begin() + 1, extra.begin(), extra.end());
            }
        }
    }
    try {
        std::vector<std::string> reversed(argv.rbegin(), argv.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        const auto subs = app.get_subcommands();
        throw UsageError(subs.empty() ? app.help() : subs.front()->help(), true);
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    const auto* active = app.get_subcommands().front();
    const std::string name = active->get_name();
    if (name == "run-synthetic") {
        cfg.command = Command::run_synthetic;
        resolve_source(cfg, f, true);
        resolve_filter(cfg, f);
    } else if (name == "run-file") {
        cfg.command = Command::run_file;
        resolve_source(cfg, f, false);
        resolve_filter(cfg, f);
        cfg.input = f.input;
    } else if (name == "calibrate") {
        cfg.command = Command::calibrate;
        resolve_source(cfg, f, true);
    } else if (name == "gains") {
        cfg.command = Command::gains;
        resolve_source(cfg, f, false);
        if (!f.steady && !f.preloaded) {
            throw UsageError("gains: give --steady or --preloaded");
        }
        cfg.steady_gains = f.steady;
        cfg.pkg_gains = f.pkg_gains == "shared" ? PkgGainMode::shared : PkgGainMode::per_model;
    } else {
        cfg.command = Command::simulate;
        resolve_source(cfg, f, false);
        if (!f.x0.empty()) {
            const auto v = parse_reals(f.x0, "--x0");
            if (v.size() != 2) {
                throw UsageError("--x0: expected 'pos,vel'");
            }
            cfg.x0 = Eigen::Vector2d(v[0], v[1]);
        }
    }

    if (!f.output.empty()) {
        cfg.output_dir = f.output;
    } else if (const char* env = std::getenv("GSF_OUTPUT_DIR"); env != nullptr && *env != '\0') {
        cfg.output_dir = env;
    }
    if (cfg.command != Command::run_synthetic) {
        cfg.threads = 1;
    } else if (active->get_option("--threads")->count() == 0) {
        cfg.threads = std::max(1u, std::thread::hardware_concurrency());
    }
    return cfg;
}

std::vector<std::pair<std::string, std::string>> RunConfig::resolved() const {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("command", std::string(to_string(command)));
    if (scenario) {
        kv.emplace_back("model.scenario", *scenario);
    }
    if (model_id) {
        kv.emplace_back("model.id", std::to_string(*model_id));
    }
    if (!c_values.empty()) {
        kv.emplace_back("model.c", join(c_values));
    }
    if (!kl_targets.empty()) {
        kv.emplace_back("model.kl", join(kl_targets));
        kv.emplace_back("calibrate.tol", csv::format_double(kl_tol));
        kv.emplace_back("calibrate.samples", std::to_string(kl_samples));
    }
    kv.emplace_back("bench.seed", std::to_string(seed));
    const auto add_filter = [&] {
        kv.emplace_back("bench.schemes", join(schemes));
        kv.emplace_back("bench.x0", join(std::vector<double>{x0[0], x0[1]}));
        kv.emplace_back("bench.prior_var", csv::format_double(prior_var));
        kv.emplace_back("bench.error", velocity_error ? "velocity" : "position");
        kv.emplace_back("bench.pkg_gains", pkg_gains == PkgGainMode::shared ? "shared" : "per-model");
    };
    switch (command) {
        case Command::run_synthetic:
            kv.emplace_back("bench.n_runs", std::to_string(n_runs));
            kv.emplace_back("bench.n_steps", std::to_string(n_steps));
            kv.emplace_back("grid.dt_ticks", std::to_string(dt_ticks));
            add_filter();
            break;
        case Command::run_file:
            kv.emplace_back("input.path", input ? input->string() : "");
            add_filter();
            break;
        case Command::calibrate: break;
        case Command::gains:
            kv.emplace_back("gains.kind", steady_gains ? "steady" : "preloaded");
            if (!steady_gains) {
                kv.emplace_back("gains.horizon", std::to_string(horizon.value_or(n_steps)));
                kv.emplace_back("bench.prior_var", csv::format_double(prior_var));
                kv.emplace_back("bench.pkg_gains",
                                pkg_gains == PkgGainMode::shared ? "shared" : "per-model");
            }
            kv.emplace_back("grid.dt_ticks", std::to_string(dt_ticks));
            break;
        case Command::simulate:
            kv.emplace_back("bench.n_steps", std::to_string(n_steps));
            kv.emplace_back("grid.dt_ticks", std::to_string(dt_ticks));
            kv.emplace_back("bench.x0", join(std::vector<double>{x0[0], x0[1]}));
            break;
    }
    return kv;
}

std::string RunConfig::hash() const {
    std::uint64_t h = 14695981039346656037ull;
    for (const auto& [key, value] : resolved()) {
        for (const char ch : key + "=" + value + "\n") {
            h ^= static_cast<unsigned char>(ch);
            h *= 1099511628211ull;
        }
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

std::vector<std::string> provenance(const RunConfig& config) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    std::ostringstream created;
    created << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");

    std::vector<std::string> lines{
        std::string("gsf ") + GSF_VERSION,
        "config_hash=" + config.hash(),
        "seed=" + std::to_string(config.seed),
        "created=" + created.str(),
    };
    for (const auto& [key, value] : config.resolved()) {
        lines.push_back("config " + key + "=" + value);
    }
    return lines;
}

namespace {

// Files are staged in memory and renamed into place only after every one of
// them has been written.
class OutputSet {
public:
    OutputSet(std::filesystem::path dir, std::vector<std::string> header)
        : dir_(std::move(dir)), header_(std::move(header)) {}

    std::ostream& open(const std::string& name) {
        auto& [path, stream] = files_.emplace_back(dir_ / name, std::ostringstream{});
        for (const auto& line : header_) {
            stream << "# " << line << '\n';
        }
        return stream;
    }

    std::vector<std::filesystem::path> commit() {
        std::filesystem::create_directories(dir_);
        std::vector<std::filesystem::path> temps;
        const auto discard = [&] {
            for (const auto& t : temps) {
                std::error_code ec;
                std::filesystem::remove(t, ec);
            }
        };
        try {
            for (const auto& [path, stream] : files_) {
                auto tmp = path;
                tmp += ".tmp." + std::to_string(::getpid());
                temps.push_back(tmp);
                std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
                out << stream.str();
                out.close();
                if (!out) {
                    throw Error("cannot write " + tmp.string());
                }
            }
            std::vector<std::filesystem::path> written;
            for (std::size_t n = 0; n < files_.size(); ++n) {
                std::filesystem::rename(temps[n], files_[n].first);
                written.push_back(files_[n].first);
            }
            return written;
        } catch (...) {
            discard();
            throw;
        }
    }

private:
    std::filesystem::path dir_;
    std::vector<std::string> header_;
    std::deque<std::pair<std::filesystem::path, std::ostringstream>> files_;
};

struct SweepPoint {
    std::optional<double> kl_target;
    std::optional<double> c;
    std::optional<KlEstimate> kl;
    NoisePair noise;
};

Rng calibration_rng(const RunConfig& cfg, std::size_t point) {
    // kept apart from the per-run streams, which use small run indices
    return run_rng(cfg.seed, ~std::uint64_t{0} - point);
}

std::vector<SweepPoint> sweep_points(const RunConfig& cfg) {
    std::vector<SweepPoint> points;
    if (cfg.scenario) {
        points.push_back({std::nullopt, std::nullopt, std::nullopt, *scenario_noise(*cfg.scenario)});
        return points;
    }
    for (double c : cfg.c_values) {
        points.push_back({std::nullopt, c, std::nullopt, build_table1(*cfg.model_id, c)});
    }
    for (std::size_t n = 0; n < cfg.kl_targets.size(); ++n) {
        Rng rng = calibration_rng(cfg, n);
        const CalibrationResult r =
            calibrate_c(*cfg.model_id, cfg.kl_targets[n], cfg.kl_tol, rng, cfg.kl_samples);
        points.push_back({cfg.kl_targets[n], r.c, r.kl, build_table1(*cfg.model_id, r.c)});
    }
    return points;
}

std::string opt_field(const std::optional<double>& v) {
    return v ? csv::format_double(*v) : std::string();
}

std::string field(double v) { return std::isfinite(v) ? csv::format_double(v) : std::string(); }

std::string point_label(const SweepPoint& p, const RunConfig& cfg) {
    std::ostringstream out;
    if (cfg.scenario) {
        out << "scenario " << *cfg.scenario;
    } else {
        out << "model " << *cfg.model_id << "  c = " << std::setprecision(5) << *p.c;
        if (p.kl_target) {
            out << "  (KL target " << *p.kl_target << ")";
        }
    }
    return out.str();
}

void print_outputs(std::ostream& out, const std::vector<std::filesystem::path>& written) {
    for (const auto& p : written) {
        out << "wrote " << p.string() << '\n';
    }
}

int run_synthetic(const RunConfig& cfg, std::ostream& out) {
    MonteCarloConfig mc;
    mc.n_runs = cfg.n_runs;
    mc.n_steps = cfg.n_steps;
    mc.seed = cfg.seed;
    mc.dt_ticks = cfg.dt_ticks;
    mc.threads = cfg.threads;
    mc.x0 = cfg.x0;
    mc.prior_var = cfg.prior_var;
    mc.error_component = cfg.velocity_error ? 1 : 0;
    mc.method_options.pkg_gains = cfg.pkg_gains;

    OutputSet files(cfg.output_dir, provenance(cfg));
    std::ostream& results = files.open("results.csv");
    std::ostream& summary = files.open("summary.csv");
    results << "method,run,rmse,cep,kl_target,c,seed\n";
    summary << "method,name,rmse,rmse_stderr,cep,n_runs,n_steps,seed,pooled_errors,aborts,"
               "kl_target,c\n";

    bool complete = true;
    const TimeGrid grid = TimeGrid::uniform(cfg.n_steps, cfg.dt_ticks);
    for (const SweepPoint& point : sweep_points(cfg)) {
        const SystemModel model =
            rw_velocity_model(point.noise.process, point.noise.measurement, grid);
        const MonteCarloReport report = run_mc(model, cfg.schemes, mc);
        complete = complete && report.complete();

        out << point_label(point, cfg) << "  runs " << cfg.n_runs << "  steps " << cfg.n_steps
            << "  seed " << cfg.seed << '\n';
        out << "  " << std::left << std::setw(12) << "method" << std::right << std::setw(12)
            << "RMSE" << std::setw(12) << "stderr" << std::setw(12) << "CEP" << std::setw(8)
            << "aborts" << '\n';
        for (const MethodReport& m : report.methods) {
            for (std::size_t r = 0; r < m.run_rmse.size(); ++r) {
                results << m.method << ',' << r << ',' << field(m.run_rmse[r]) << ','
                        << field(m.run_cep[r]) << ',' << opt_field(point.kl_target) << ','
                        << opt_field(point.c) << ',' << cfg.seed << '\n';
            }
            summary << m.method << ',' << display_name(m.method) << ',' << field(m.rmse) << ','
                    << field(m.rmse_stderr) << ',' << field(m.cep) << ',' << m.n_runs << ','
                    << m.n_steps << ',' << m.seed << ',' << m.pooled_errors << ','
                    << m.aborts.size() << ',' << opt_field(point.kl_target) << ','
                    << opt_field(point.c) << '\n';
            out << "  " << std::left << std::setw(12) << display_name(m.method) << std::right
                << std::fixed << std::setprecision(4) << std::setw(12) << m.rmse << std::setw(12)
                << m.rmse_stderr << std::setw(12) << m.cep << std::setw(8) << m.aborts.size()
                << std::defaultfloat << '\n';
            for (const auto& a : m.aborts) {
                out << "    aborted " << a << '\n';
            }
        }
    }
    print_outputs(out, files.commit());
    return complete ? 0 : 3;
}

int run_calibrate(const RunConfig& cfg, std::ostream& out) {
    OutputSet files(cfg.output_dir, provenance(cfg));
    std::ostream& csv_out = files.open("calibration.csv");
    csv_out << "model,kl_target,c,kl,kl_stderr,evaluations,samples,seed\n";
    for (std::size_t n = 0; n < cfg.kl_targets.size(); ++n) {
        Rng rng = calibration_rng(cfg, n);
        const CalibrationResult r =
            calibrate_c(*cfg.model_id, cfg.kl_targets[n], cfg.kl_tol, rng, cfg.kl_samples);
        csv_out << *cfg.model_id << ',' << csv::format_double(cfg.kl_targets[n]) << ','
                << csv::format_double(r.c) << ',' << csv::format_double(r.kl.value) << ','
                << csv::format_double(r.kl.std_error) << ',' << r.evaluations << ','
                << cfg.kl_samples << ',' << cfg.seed << '\n';
        out << "model " << *cfg.model_id << "  KL " << cfg.kl_targets[n] << "  c = "
            << std::setprecision(5) << r.c << "  (KL " << r.kl.value << " +- "
            << r.kl.std_error << ")" << std::defaultfloat << '\n';
    }
    print_outputs(out, files.commit());
    return 0;
}

void write_gain_row(std::ostream& out, std::size_t step, const std::string& i,
                    const std::string& j, const MatrixXd& k) {
    out << step << ',' << i << ',' << j;
    for (Eigen::Index r = 0; r < k.rows(); ++r) {
        for (Eigen::Index c = 0; c < k.cols(); ++c) {
            out << ',' << csv::format_double(k(r, c));
        }
    }
    out << '\n';
}

int run_gains(const RunConfig& cfg, std::ostream& out) {
    const SweepPoint point = sweep_points(cfg).front();
    const std::size_t horizon = cfg.horizon.value_or(cfg.n_steps);
    const SystemModel model =
        rw_velocity_model(point.noise.process, point.noise.measurement,
                          TimeGrid::uniform(cfg.steady_gains ? 1 : horizon, cfg.dt_ticks));
    const MatrixXd p0 = cfg.prior_var * MatrixXd::Identity(2, 2);
    const BankGains gains = cfg.steady_gains ? steady_state_bank_gains(model, 0)
                            : cfg.pkg_gains == PkgGainMode::shared
                                ? preloaded_shared_gains(model, p0, horizon)
                                : preloaded_per_model_gains(model, p0, horizon);

    OutputSet files(cfg.output_dir, provenance(cfg));
    std::ostream& csv_out = files.open("gains.csv");
    csv_out << "step,i,j,k_0_0,k_1_0\n";
    const std::size_t cv = point.noise.process.count();
    const std::size_t cw = point.noise.measurement.count();
    if (gains.is_shared()) {
        const GainSchedule& s = gains.schedules().front();
        for (std::size_t k = 0; k < s.horizon(); ++k) {
            write_gain_row(csv_out, k, "", "", s.at(k));
        }
    } else {
        for (std::size_t i = 0; i < cv; ++i) {
            for (std::size_t j = 0; j < cw; ++j) {
                const GainSchedule& s = gains.schedule({i, j});
                for (std::size_t k = 0; k < s.horizon(); ++k) {
                    write_gain_row(csv_out, k, std::to_string(i), std::to_string(j), s.at(k));
                }
            }
        }
    }
    out << (cfg.steady_gains ? "steady-state" : "preloaded") << " gains for "
        << point_label(point, cfg) << ": " << (gains.is_shared() ? 1 : cv * cw)
        << " schedule(s)\n";
    print_outputs(out, files.commit());
    return 0;
}

int run_simulate(const RunConfig& cfg, std::ostream& out) {
    const SweepPoint point = sweep_points(cfg).front();
    const TimeGrid grid = TimeGrid::uniform(cfg.n_steps, cfg.dt_ticks);
    const SystemModel model = rw_velocity_model(point.noise.process, point.noise.measurement, grid);
    Rng rng = run_rng(cfg.seed, 0);
    const Trajectory traj = simulate(model, cfg.x0, grid, rng);

    OutputSet files(cfg.output_dir, {});
    std::ostream& csv_out = files.open("trajectory.csv");
    write_trajectory_csv(csv_out, traj, provenance(cfg));
    out << "simulated " << traj.size() << " steps of " << point_label(point, cfg) << '\n';
    print_outputs(out, files.commit());
    return 0;
}

int run_file_command(const RunConfig& cfg, std::ostream& out) {
    const Trajectory traj = ingest_trajectory(*cfg.input);
    const std::vector<FileMethodResult> results = run_file(cfg, traj);

    OutputSet files(cfg.output_dir, provenance(cfg));
    std::ostream& est = files.open("estimates.csv");
    std::ostream& summary = files.open("summary.csv");
    est << "step,method,x_pos,x_vel,chosen_i,chosen_j\n";
    summary << "method,name,rmse,cep,n_steps,status\n";
    bool complete = true;
    out << "  " << std::left << std::setw(12) << "method" << std::right << std::setw(12)
        << "RMSE" << std::setw(12) << "CEP" << "  status\n";
    for (const auto& r : results) {
        complete = complete && !r.error;
        for (std::size_t k = 0; k < r.output.estimates.size(); ++k) {
            const auto& x = r.output.estimates[k];
            const auto& chosen = r.output.chosen[k];
            est << k + 1 << ',' << r.method << ',' << csv::format_double(x[0]) << ','
                << csv::format_double(x[1]) << ','
                << (chosen ? std::to_string(chosen->i) : std::string()) << ','
                << (chosen ? std::to_string(chosen->j) : std::string()) << '\n';
        }
        std::string status = r.error ? "error: " + *r.error : "ok";
        std::replace(status.begin(), status.end(), ',', ';');
        summary << r.method << ',' << display_name(r.method) << ',' << opt_field(r.rmse) << ','
                << opt_field(r.cep) << ',' << r.output.estimates.size() << ',' << status << '\n';
        out << "  " << std::left << std::setw(12) << display_name(r.method) << std::right
            << std::fixed << std::setprecision(4) << std::setw(12) << r.rmse.value_or(NAN)
            << std::setw(12) << r.cep.value_or(NAN) << "  " << status << std::defaultfloat
            << '\n';
    }
    print_outputs(out, files.commit());
    return complete ? 0 : 3;
}

}  // namespace

std::vector<FileMethodResult> run_file(const RunConfig& config, const Trajectory& trajectory) {
    const SweepPoint point = sweep_points(config).front();
    const SystemModel model =
        rw_velocity_model(point.noise.process, point.noise.measurement, trajectory.grid);
    MethodOptions options;
    options.pkg_gains = config.pkg_gains;
    if (!trajectory.grid.is_constant()) {
        options.steady_state_model =
            rw_velocity_model(point.noise.process, point.noise.measurement, TimeGrid::uniform(1));
    }
    const MatrixXd p0 = config.prior_var * MatrixXd::Identity(2, 2);
    const KalmanState prior{config.x0, p0, 0};
    const Eigen::Index component = config.velocity_error ? 1 : 0;

    std::vector<FileMethodResult> results;
    for (const auto& id : config.schemes) {
        FileMethodResult r;
        r.method = id;
        try {
            const Method method = make_method(id, model, p0, trajectory.size(), options);
            r.output = run_filter(method, model, trajectory, prior);
            if (trajectory.has_truth()) {
                std::vector<double> errors;
                errors.reserve(trajectory.size());
                for (std::size_t k = 0; k < trajectory.size(); ++k) {
                    errors.push_back(r.output.estimates[k][component] -
                                     trajectory.states[k][component]);
                }
                r.rmse = rmse(errors);
                r.cep = cep(errors);
            }
        } catch (const Error& e) {
            r.output = {};
            r.error = e.what();
        }
        results.push_back(std::move(r));
    }
    return results;
}

int execute(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        switch (config.command) {
            case Command::run_synthetic: return run_synthetic(config, out);
            case Command::run_file: return run_file_command(config, out);
            case Command::calibrate: return run_calibrate(config, out);
            case Command::gains: return run_gains(config, out);
            case Command::simulate: return run_simulate(config, out);
        }
    } catch (const std::exception& e) {
        err << "gsf " << to_string(config.command) << ": " << e.what() << '\n';
    }
    return 1;
}

}  // namespace gsf::app
