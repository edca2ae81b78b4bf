#pragma once

#include "gsf/experiment.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gsf::app {

enum class Command { run_synthetic, run_file, calibrate, gains, simulate };

[[nodiscard]] std::string_view to_string(Command c);

/// Bad command line or config file. `help` marks a --help request whose
/// text is in what().
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what, bool help = false)
        : std::runtime_error(what), help_(help) {}
    [[nodiscard]] bool help() const { return help_; }

private:
    bool help_;
};

struct RunConfig {
    Command command = Command::run_synthetic;

    // noise source: a synthetic model (with c or KL targets) or a packaged scenario
    std::optional<int> model_id;
    std::vector<double> c_values;
    std::vector<double> kl_targets;
    std::optional<std::string> scenario;

    std::vector<std::string> schemes;
    std::size_t n_runs = 200;
    std::size_t n_steps = 500;
    std::uint64_t seed = 1;
    unsigned dt_ticks = 1;
    unsigned threads = 1;
    VectorXd x0 = VectorXd::Zero(2);
    double prior_var = 1e-2;
    bool velocity_error = false;
    PkgGainMode pkg_gains = PkgGainMode::per_model;

    double kl_tol = 0.005;
    std::size_t kl_samples = kKlSamples;

    bool steady_gains = false;
    std::optional<std::size_t> horizon;

    std::optional<std::filesystem::path> input;
    std::filesystem::path output_dir = ".";

    /// Canonical `key=value` list of every setting that affects results, in
    /// a fixed order. Output location and thread count are left out.
    [[nodiscard]] std::vector<std::pair<std::string, std::string>> resolved() const;
    /// FNV-1a of the resolved settings, as 16 hex digits.
    [[nodiscard]] std::string hash() const;
};

/// Parses `<command> [options]`. A `--config FILE` option loads flat
/// `section.key = value` lines first; flags given on the command line win.
/// Throws UsageError.
[[nodiscard]] RunConfig parse_config(const std::vector<std::string>& args);

/// Lines written at the top of every output CSV, without the "# " prefix.
/// The `created=` line is the only one that varies between identical runs.
[[nodiscard]] std::vector<std::string> provenance(const RunConfig& config);

struct FileMethodResult {
    std::string method;
    FilterOutput output;
    std::optional<double> rmse;  // only with ground truth
    std::optional<double> cep;
    std::optional<std::string> error;
};

/// Filters one ingested trajectory with every configured scheme.
[[nodiscard]] std::vector<FileMethodResult> run_file(const RunConfig& config,
                                                     const Trajectory& trajectory);

/// Runs the command, writes its CSV outputs atomically into output_dir and
/// prints a summary to `out`. Returns 0 when every method completed every
/// run, 3 when some runs aborted, 1 on any other failure (reported on `err`,
/// no outputs left behind).
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace gsf::app
