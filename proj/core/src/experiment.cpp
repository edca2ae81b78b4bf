#include "gsf/experiment.hpp"

#include "gsf/error.hpp"
#include "gsf/gsf_bank.hpp"
#include "gsf/metrics.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

namespace gsf {

CalibrationResult calibrate_c(int model_id, double target_kl, double tol, Rng& rng,
                              std::size_t n_samples) {
    if (!(target_kl > 0.0)) {
        throw InvalidArgument("calibrate_c: target KL must be positive");
    }
    if (!(tol > 0.0)) {
        throw InvalidArgument("calibrate_c: tolerance must be positive");
    }
    const std::uint64_t stream_seed = rng();
    std::size_t evaluations = 0;
    const auto kl_at = [&](double c) {
        ++evaluations;
        const GaussianMixture m = build_table1(model_id, c).process;
        Rng stream(stream_seed);
        return kl_mc(m, moment_match(m), n_samples, stream);
    };

    double lo = 0.0;
    double hi = 0.1;
    KlEstimate at_hi = kl_at(hi);
    for (int doubling = 0; at_hi.value < target_kl; ++doubling) {
        if (std::abs(at_hi.value - target_kl) < tol) {
            return {hi, at_hi, evaluations};
        }
        if (doubling == 60) {
            throw NoConvergence("calibrate_c: could not bracket target KL " +
                                std::to_string(target_kl));
        }
        lo = hi;
        hi *= 2.0;
        at_hi = kl_at(hi);
    }
    if (std::abs(at_hi.value - target_kl) < tol) {
        return {hi, at_hi, evaluations};
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const KlEstimate est = kl_at(mid);
        if (std::abs(est.value - target_kl) < tol) {
            return {mid, est, evaluations};
        }
        (est.value < target_kl ? lo : hi) = mid;
    }
    throw NoConvergence("calibrate_c: bisection did not reach tolerance");
}

const std::vector<std::string>& all_method_ids() {
    static const std::vector<std::string> ids{
        "kalman",        "merge",         "remove",       "matched",       "proposed:gsfm",
        "proposed:gsfr", "proposed:pkg",  "proposed:ssg", "proposed:dkg",
    };
    return ids;
}

std::string display_name(std::string_view method_id) {
    static const std::map<std::string, std::string, std::less<>> names{
        {"kalman", "Kalman"},
        {"merge", "GSF-merge"},
        {"remove", "GSF-remove"},
        {"matched", "Matched"},
        {"proposed:gsfm", "Red-GSFM"},
        {"proposed:gsfr", "Red-GSFR"},
        {"proposed:pkg", "Red-PKG"},
        {"proposed:ssg", "Red-SSG"},
        {"proposed:dkg", "Red-DKG"},
    };
    const auto it = names.find(method_id);
    return it == names.end() ? std::string(method_id) : it->second;
}

Method make_method(std::string_view id, const SystemModel& model, const MatrixXd& p0,
                   std::size_t horizon, const MethodOptions& options) {
    if (id == "kalman") {
        return {"kalman", std::nullopt};
    }
    const SchemeId scheme = parse_scheme_id(id);
    switch (scheme.kind) {
        case ReductionKind::merge: return {std::string(id), ReductionScheme::merge()};
        case ReductionKind::remove: return {std::string(id), ReductionScheme::remove()};
        case ReductionKind::matched: return {std::string(id), ReductionScheme::matched()};
        case ReductionKind::proposed: break;
    }
    const InitEstimator estimator = *scheme.estimator;
    if (estimator == InitEstimator::pkg) {
        BankGains gains = options.pkg_gains == PkgGainMode::shared
                              ? preloaded_shared_gains(model, p0, horizon)
                              : preloaded_per_model_gains(model, p0, horizon);
        return {std::string(id), ReductionScheme::proposed(estimator, std::move(gains))};
    }
    if (estimator == InitEstimator::ssg) {
        const SystemModel& source =
            options.steady_state_model ? *options.steady_state_model : model;
        return {std::string(id),
                ReductionScheme::proposed(estimator,
                                          steady_state_bank_gains(source, 0, options.riccati_tol,
                                                                  options.riccati_max_iter))};
    }
    return {std::string(id), ReductionScheme::proposed(estimator)};
}

FilterOutput run_filter(const Method& method, const SystemModel& model,
                        const Trajectory& trajectory, const KalmanState& prior) {
    FilterOutput out;
    const std::size_t n = trajectory.size();
    out.estimates.reserve(n);
    out.chosen.reserve(n);
    KalmanState state = prior;
    state.step = 0;

    if (!method.scheme) {
        // moment-matched noises, rebuilt only when the step's mixture changes
        const GaussianMixture* cached_v = nullptr;
        const GaussianMixture* cached_w = nullptr;
        std::optional<Gaussian> vbar;
        std::optional<Gaussian> wbar;
        for (std::size_t k = 0; k < n; ++k) {
            const StepModel& m = model.at(k);
            if (m.process_noise.get() != cached_v) {
                cached_v = m.process_noise.get();
                vbar = moment_match(*cached_v);
            }
            if (m.measurement_noise.get() != cached_w) {
                cached_w = m.measurement_noise.get();
                wbar = moment_match(*cached_w);
            }
            state = kf_step(state, model, trajectory.measurements[k], *vbar, *wbar).state;
            out.estimates.push_back(state.mean);
            out.chosen.emplace_back();
        }
        return out;
    }

    const ReductionScheme& scheme = *method.scheme;
    const bool needs_truth = scheme.kind() == ReductionKind::matched;
    if (needs_truth && !trajectory.has_labels()) {
        throw MissingTruth("matched filter needs active cluster labels in the trajectory");
    }
    for (std::size_t k = 0; k < n; ++k) {
        const VectorXd& z = trajectory.measurements[k];
        const PosteriorMixture posterior = gsf_step(state, model, z, k);
        std::optional<ModelIndex> truth;
        if (needs_truth) {
            truth = ModelIndex{trajectory.active_v[k], trajectory.active_w[k]};
        }
        ReducedPosterior reduced = reduce(scheme, posterior, state, model, z, truth);
        state = std::move(reduced.state);
        out.estimates.push_back(state.mean);
        out.chosen.push_back(reduced.chosen);
    }
    return out;
}

const MethodReport& MonteCarloReport::method(std::string_view id) const {
    for (const auto& m : methods) {
        if (m.method == id) {
            return m;
        }
    }
    throw InvalidArgument("no report for method '" + std::string(id) + "'");
}

bool MonteCarloReport::complete() const {
    for (const auto& m : methods) {
        if (!m.aborts.empty()) {
            return false;
        }
    }
    return true;
}

Rng run_rng(std::uint64_t seed, std::uint64_t run_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(run_index),
                      static_cast<std::uint32_t>(run_index >> 32)};
    return Rng(seq);
}

MonteCarloReport run_mc(const SystemModel& model, const std::vector<std::string>& method_ids,
                        const MonteCarloConfig& config) {
    if (config.n_runs == 0 || config.n_steps == 0) {
        throw InvalidArgument("run_mc: n_runs and n_steps must be positive");
    }
    if (config.x0.size() != model.state_dim()) {
        throw InvalidArgument("run_mc: x0 has wrong dimension");
    }
    if (config.error_component < 0 || config.error_component >= model.state_dim()) {
        throw InvalidArgument("run_mc: error component out of range");
    }
    const Eigen::Index nx = model.state_dim();
    const MatrixXd p0 = config.prior_var * MatrixXd::Identity(nx, nx);
    const KalmanState prior{config.x0, p0, 0};
    const TimeGrid grid = [&] {
        std::vector<double> dts;
        dts.reserve(config.n_steps);
        for (std::size_t k = 0; k < config.n_steps; ++k) {
            dts.push_back(config.dt_ticks * kTick);
        }
        return TimeGrid(std::move(dts));
    }();

    std::vector<Method> methods;
    methods.reserve(method_ids.size());
    for (const auto& id : method_ids) {
        methods.push_back(make_method(id, model, p0, config.n_steps, config.method_options));
    }

    const std::size_t n_methods = methods.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    // [method][run] results; each run's slot is written by exactly one worker
    std::vector<std::vector<double>> run_rmse(n_methods, std::vector<double>(config.n_runs, nan));
    std::vector<std::vector<double>> run_cep(n_methods, std::vector<double>(config.n_runs, nan));
    std::vector<std::vector<std::vector<double>>> run_errors(
        n_methods, std::vector<std::vector<double>>(config.n_runs));
    std::vector<std::vector<std::string>> run_abort(
        n_methods, std::vector<std::string>(config.n_runs));

    std::atomic<std::size_t> next_run{0};
    std::mutex failure_mutex;
    std::exception_ptr failure;
    const auto worker = [&] {
        try {
            for (std::size_t r = next_run++; r < config.n_runs; r = next_run++) {
                Rng rng = run_rng(config.seed, r);
                const Trajectory truth = simulate(model, config.x0, grid, rng);
                for (std::size_t m = 0; m < n_methods; ++m) {
                    try {
                        const FilterOutput fo = run_filter(methods[m], model, truth, prior);
                        std::vector<double> errors;
                        errors.reserve(truth.size());
                        for (std::size_t k = 0; k < truth.size(); ++k) {
                            errors.push_back(fo.estimates[k][config.error_component] -
                                             truth.states[k][config.error_component]);
                        }
                        run_rmse[m][r] = rmse(errors);
                        run_cep[m][r] = cep(errors);
                        run_errors[m][r] = std::move(errors);
                    } catch (const Error& e) {
                        run_abort[m][r] = e.what();
                    }
                }
            }
        } catch (...) {
            const std::lock_guard lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
        }
    };
    const unsigned n_threads =
        std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(config.n_runs)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    MonteCarloReport report;
    for (std::size_t m = 0; m < n_methods; ++m) {
        MethodReport mr;
        mr.method = methods[m].id;
        mr.n_steps = config.n_steps;
        mr.seed = config.seed;
        std::vector<double> completed;
        std::vector<double> pooled;
        for (std::size_t r = 0; r < config.n_runs; ++r) {
            if (!run_abort[m][r].empty()) {
                mr.aborts.push_back("run " + std::to_string(r) + ": " + run_abort[m][r]);
                continue;
            }
            completed.push_back(run_rmse[m][r]);
            pooled.insert(pooled.end(), run_errors[m][r].begin(), run_errors[m][r].end());
        }
        mr.n_runs = completed.size();
        mr.pooled_errors = pooled.size();
        if (!completed.empty()) {
            const MeanStderr ms = mean_and_stderr(completed);
            mr.rmse = ms.mean;
            mr.rmse_stderr = ms.std_error;
            mr.cep = cep(pooled);
        } else {
            mr.rmse = mr.rmse_stderr = mr.cep = nan;
        }
        mr.run_rmse = std::move(run_rmse[m]);
        mr.run_cep = std::move(run_cep[m]);
        report.methods.push_back(std::move(mr));
    }
    return report;
}

MonteCarloReport run_mc(const SyntheticModelSpec& spec, const std::vector<std::string>& method_ids,
                        const MonteCarloConfig& config) {
    const SystemModel model =
        build_synthetic_model(spec, TimeGrid::uniform(config.n_steps, config.dt_ticks));
    return run_mc(model, method_ids, config);
}

}  // namespace gsf
