#pragma once

#include "gsf/gaussian.hpp"
#include "gsf/kalman.hpp"
#include "gsf/reduction.hpp"
#include "gsf/scenarios.hpp"
#include "gsf/state_space.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gsf {

/// Number of samples behind every KL figure used for calibration.
inline constexpr std::size_t kKlSamples = 200000;

struct CalibrationResult {
    double c;
    KlEstimate kl;
    std::size_t evaluations;
};

/// Finds the separation c at which KL(mixture || moment-matched Gaussian)
/// of synthetic model `model_id` hits `target_kl` within `tol`.
///
/// Doubles an upper bracket from c = 0.1 and then bisects. Every KL
/// evaluation reuses the same sample stream (seeded from one draw of `rng`),
/// so the objective is a deterministic, monotone function of c. Throws
/// NoConvergence if the bracket or the bisection fails.
[[nodiscard]] CalibrationResult calibrate_c(int model_id, double target_kl, double tol, Rng& rng,
                                            std::size_t n_samples = kKlSamples);

/// How Red-PKG obtains its preloaded gains.
enum class PkgGainMode {
    per_model,  // one offline schedule per (i, j) from Q^i, R^j
    shared,     // a single schedule from the moment-matched noises
};

struct MethodOptions {
    PkgGainMode pkg_gains = PkgGainMode::per_model;
    double riccati_tol = 1e-10;
    std::size_t riccati_max_iter = 100000;
    /// Model whose step 0 supplies the matrices for steady-state gains. When
    /// empty, step 0 of the filtered model is used.
    std::optional<SystemModel> steady_state_model;
};

/// A filter under test: the single-Gaussian Kalman baseline (moment-matched
/// noises, no scheme) or the bank with a reduction scheme.
struct Method {
    std::string id;
    std::optional<ReductionScheme> scheme;
};

/// kalman, merge, remove, matched, proposed:{gsfm,gsfr,pkg,ssg,dkg}.
[[nodiscard]] const std::vector<std::string>& all_method_ids();

/// Human-readable label, e.g. "GSF-merge" or "Red-DKG".
[[nodiscard]] std::string display_name(std::string_view method_id);

/// Instantiates a method, computing offline gains over `horizon` steps from
/// prior covariance `p0` when the scheme needs them.
[[nodiscard]] Method make_method(std::string_view id, const SystemModel& model,
                                 const MatrixXd& p0, std::size_t horizon,
                                 const MethodOptions& options = {});

struct FilterOutput {
    std::vector<VectorXd> estimates;                 // x_{k|k}, k = 1..N
    std::vector<std::optional<ModelIndex>> chosen;  // kept model, when the scheme picks one
};

/// Runs a method over a trajectory starting from `prior`. The Matched
/// scheme reads the trajectory's labels and throws MissingTruth without them.
[[nodiscard]] FilterOutput run_filter(const Method& method, const SystemModel& model,
                                      const Trajectory& trajectory, const KalmanState& prior);

struct MonteCarloConfig {
    std::size_t n_runs = 200;
    std::size_t n_steps = 500;
    std::uint64_t seed = 1;
    unsigned dt_ticks = 1;
    unsigned threads = 1;
    VectorXd x0 = VectorXd::Zero(2);
    double prior_var = 1e-2;
    Eigen::Index error_component = 0;  // 0 = position, 1 = velocity
    MethodOptions method_options;
};

struct MethodReport {
    std::string method;
    double rmse = 0.0;         // mean over completed runs of the per-run RMSE
    double rmse_stderr = 0.0;  // standard error of that mean
    double cep = 0.0;          // median |error| pooled over all completed runs
    std::size_t n_runs = 0;    // completed runs
    std::size_t n_steps = 0;
    std::uint64_t seed = 0;
    std::size_t pooled_errors = 0;
    std::vector<double> run_rmse;  // NaN for aborted runs
    std::vector<double> run_cep;   // NaN for aborted runs
    std::vector<std::string> aborts;  // "run <r>: <message>"
};

struct MonteCarloReport {
    std::vector<MethodReport> methods;

    [[nodiscard]] const MethodReport& method(std::string_view id) const;
    [[nodiscard]] bool complete() const;
};

/// Independent generator for run `run_index` of an experiment seeded with
/// `seed`; results do not depend on how runs are spread over threads.
[[nodiscard]] Rng run_rng(std::uint64_t seed, std::uint64_t run_index);

/// Monte-Carlo comparison on a fixed model. Every method filters the same
/// simulated trajectory within a run. A filter error aborts that method's
/// run and is recorded in its report.
[[nodiscard]] MonteCarloReport run_mc(const SystemModel& model,
                                      const std::vector<std::string>& method_ids,
                                      const MonteCarloConfig& config);

/// Builds the synthetic model on a uniform grid of n_steps intervals of
/// dt_ticks ticks and runs it.
[[nodiscard]] MonteCarloReport run_mc(const SyntheticModelSpec& spec,
                                      const std::vector<std::string>& method_ids,
                                      const MonteCarloConfig& config);

}  // namespace gsf
