#pragma once

#include "gsf/gsf_bank.hpp"
#include "gsf/kalman.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gsf {

enum class ReductionKind { merge, remove, matched, proposed };

/// How the proposed scheme obtains its initial state estimate x_check.
enum class InitEstimator {
    gsfm,  // merged bank mean
    gsfr,  // mean of the highest-weight bank member
    pkg,   // bank means re-updated with preloaded offline gains, then merged
    ssg,   // same with per-model steady-state gains
    dkg,   // one Kalman step with moment-matched noises
};

[[nodiscard]] std::string_view to_string(InitEstimator e);
[[nodiscard]] std::string_view to_string(ReductionKind k);

/// Offline gains for the pkg/ssg estimators: either one schedule shared by
/// every bank member, or one schedule per model stored i-major.
class BankGains {
public:
    static BankGains shared(GainSchedule schedule);
    static BankGains per_model(std::vector<GainSchedule> schedules, std::size_t process_clusters,
                               std::size_t measurement_clusters);

    [[nodiscard]] bool is_shared() const { return shared_; }
    [[nodiscard]] const std::vector<GainSchedule>& schedules() const { return schedules_; }
    [[nodiscard]] const GainSchedule& schedule(ModelIndex m) const;
    [[nodiscard]] const MatrixXd& gain(ModelIndex m, std::size_t step) const {
        return schedule(m).at(step);
    }

private:
    BankGains(std::vector<GainSchedule> schedules, bool shared, std::size_t cv, std::size_t cw);

    std::vector<GainSchedule> schedules_;
    bool shared_;
    std::size_t process_clusters_;
    std::size_t measurement_clusters_;
};

/// One schedule from the moment-matched noises, shared across the bank.
[[nodiscard]] BankGains preloaded_shared_gains(const SystemModel& model, const MatrixXd& p0,
                                               std::size_t horizon);

/// Per-model schedules from each cluster pair's covariances (Q^i, R^j).
[[nodiscard]] BankGains preloaded_per_model_gains(const SystemModel& model, const MatrixXd& p0,
                                                  std::size_t horizon);

/// Per-model steady-state gains for the matrices in force at `step`.
[[nodiscard]] BankGains steady_state_bank_gains(const SystemModel& model, std::size_t step,
                                                double tol = 1e-10,
                                                std::size_t max_iter = 100000);

/// Strategy collapsing the bank posterior back to one Gaussian per step.
/// Invariants: an estimator is present iff kind is proposed; gains are
/// present iff the estimator is pkg or ssg.
class ReductionScheme {
public:
    static ReductionScheme merge();
    static ReductionScheme remove();
    static ReductionScheme matched();
    /// gsfm, gsfr or dkg. Throws MissingGains for pkg/ssg.
    static ReductionScheme proposed(InitEstimator estimator);
    /// pkg or ssg with their offline gains.
    static ReductionScheme proposed(InitEstimator estimator, BankGains gains);

    [[nodiscard]] ReductionKind kind() const { return kind_; }
    [[nodiscard]] std::optional<InitEstimator> estimator() const { return estimator_; }
    [[nodiscard]] const BankGains* gains() const { return gains_.get(); }

    /// Config-string name: merge | remove | matched | proposed:<estimator>.
    [[nodiscard]] std::string name() const;

private:
    ReductionScheme(ReductionKind kind, std::optional<InitEstimator> estimator,
                    std::shared_ptr<const BankGains> gains);

    ReductionKind kind_;
    std::optional<InitEstimator> estimator_;
    std::shared_ptr<const BankGains> gains_;
};

/// Parsed form of a scheme config string, before any gains are attached.
struct SchemeId {
    ReductionKind kind;
    std::optional<InitEstimator> estimator;

    friend bool operator==(const SchemeId&, const SchemeId&) = default;
};

/// Parses merge | remove | matched | proposed:{gsfm,gsfr,pkg,ssg,dkg}.
/// Throws InvalidArgument otherwise.
[[nodiscard]] SchemeId parse_scheme_id(std::string_view text);

struct ReducedPosterior {
    KalmanState state;
    std::optional<ModelIndex> chosen;
    std::optional<VectorXd> init_estimate;
};

/// Moment-matched single Gaussian of the whole posterior.
[[nodiscard]] ReducedPosterior reduce_merge(const PosteriorMixture& p);

/// Keeps the highest-weight member; ties go to the smallest (i, j).
[[nodiscard]] ReducedPosterior reduce_remove(const PosteriorMixture& p);

/// Keeps the member of the true active model. Simulation-only oracle.
/// Throws MissingTruth when `truth` is empty.
[[nodiscard]] ReducedPosterior reduce_matched(const PosteriorMixture& p,
                                              std::optional<ModelIndex> truth);

/// Initial state estimate x_check for the proposed scheme. `prev` is the
/// reduced posterior the bank was started from. Throws MissingGains if
/// pkg/ssg is requested without gains.
[[nodiscard]] VectorXd initial_estimate(InitEstimator estimator, const PosteriorMixture& p,
                                        const KalmanState& prev, const SystemModel& model,
                                        const VectorXd& z, std::size_t step,
                                        const BankGains* gains);

/// Per-cluster log scores used to pick the active model from noise
/// approximations v_check = x_check - F x_prev and w_check = z - H x_check.
///
/// process[i] = log w^i + log N(v_check; u^i, Q^i). When the model's process
/// noise is a lifted scalar mixture, its covariance is rank one and the
/// vector density vanishes off the support; the score then uses the
/// least-squares coordinate s = g^T v_check / g^T g with the scalar cluster
/// density N(s; u^i, sigma_i^2).
/// measurement[j] = log p^j + log N(w_check; b^j, R^j).
struct ActiveScores {
    std::vector<double> process;
    std::vector<double> measurement;
};

[[nodiscard]] ActiveScores active_scores(const VectorXd& init_estimate,
                                         const VectorXd& prev_mean, const VectorXd& z,
                                         const SystemModel& model, std::size_t step);

/// argmax over (i, j) of the product of the process and measurement terms.
/// The product separates, so each factor is maximized on its own; ties go
/// to the smallest index.
[[nodiscard]] ModelIndex select_active(const VectorXd& init_estimate, const VectorXd& prev_mean,
                                       const VectorXd& z, const SystemModel& model,
                                       std::size_t step);

/// Proposed reduction: x_check from the scheme's estimator, active model
/// from select_active, and that member's mean and covariance as output.
[[nodiscard]] ReducedPosterior reduce_proposed(const PosteriorMixture& p, const KalmanState& prev,
                                               const SystemModel& model, const VectorXd& z,
                                               std::size_t step, const ReductionScheme& scheme);

/// Dispatches on scheme.kind(). `truth` is only consulted by matched.
[[nodiscard]] ReducedPosterior reduce(const ReductionScheme& scheme, const PosteriorMixture& p,
                                      const KalmanState& prev, const SystemModel& model,
                                      const VectorXd& z, std::optional<ModelIndex> truth = {});

}  // namespace gsf
