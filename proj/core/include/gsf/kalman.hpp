#pragma once

#include "gsf/gaussian.hpp"
#include "gsf/state_space.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace gsf {

/// Gaussian belief N(mean, cov) after `step` measurements have been
/// processed. The next update consumes the measurement at 0-based step
/// index `step`.
struct KalmanState {
    VectorXd mean;
    MatrixXd cov;
    std::size_t step = 0;
};

struct Prediction {
    VectorXd mean;
    MatrixXd cov;
};

struct KalmanUpdate {
    KalmanState state;
    VectorXd innovation;      // z - z_pred
    MatrixXd innovation_cov;  // S
    MatrixXd gain;            // K
};

/// x- = F x + u, P- = F P F^T + Q.
[[nodiscard]] Prediction kf_predict(const KalmanState& state, const MatrixXd& transition,
                                    const VectorXd& process_mean, const MatrixXd& process_cov);

/// Optimal update of a prediction with measurement z under noise N(b, R).
/// Covariance uses the Joseph form. Throws DegenerateInnovation if S is not
/// positive definite.
[[nodiscard]] KalmanUpdate kf_update(const Prediction& prior, const MatrixXd& observation,
                                     const VectorXd& meas_mean, const MatrixXd& meas_cov,
                                     const VectorXd& z, std::size_t next_step);

/// (I - K H) P- (I - K H)^T + K R K^T, symmetrized. PSD for any K.
[[nodiscard]] MatrixXd joseph_cov(const MatrixXd& predicted_cov, const MatrixXd& gain,
                                  const MatrixXd& observation, const MatrixXd& meas_cov);

/// One Kalman step at step index state.step with single-Gaussian noises
/// vbar (process) and wbar (measurement), which may have nonzero means.
[[nodiscard]] KalmanUpdate kf_step(const KalmanState& state, const SystemModel& model,
                                   const VectorXd& z, const Gaussian& vbar, const Gaussian& wbar);

/// Same recursion with an externally supplied gain K (n_x x n_z).
[[nodiscard]] KalmanState kf_step_with_gain(const KalmanState& state, const SystemModel& model,
                                            const VectorXd& z, const Gaussian& vbar,
                                            const Gaussian& wbar, const MatrixXd& gain);

enum class GainKind { preloaded, steady_state };

/// Kalman gains computed offline. A preloaded schedule holds one gain per
/// step; a steady-state schedule holds a single gain valid at every step.
class GainSchedule {
public:
    static GainSchedule preloaded(std::vector<MatrixXd> gains);
    static GainSchedule steady_state(MatrixXd gain);

    [[nodiscard]] GainKind kind() const { return kind_; }
    [[nodiscard]] const std::vector<MatrixXd>& gains() const { return gains_; }
    [[nodiscard]] std::size_t horizon() const { return gains_.size(); }

    /// Gain for step k. Throws MissingGains past the end of a preloaded
    /// schedule.
    [[nodiscard]] const MatrixXd& at(std::size_t k) const;

private:
    GainSchedule(GainKind kind, std::vector<MatrixXd> gains);

    GainKind kind_;
    std::vector<MatrixXd> gains_;
};

/// Runs the measurement-free covariance recursion from P0 for `horizon`
/// steps with fixed single-Gaussian noises and returns K_0..K_{horizon-1}.
[[nodiscard]] GainSchedule precompute_gains(const SystemModel& model, const Gaussian& noise_v,
                                            const Gaussian& noise_w, const MatrixXd& p0,
                                            std::size_t horizon);

/// As above, but each step uses the moment-matched Gaussians of the model's
/// noise mixtures at that step.
[[nodiscard]] GainSchedule precompute_gains(const SystemModel& model, const MatrixXd& p0,
                                            std::size_t horizon);

struct SteadyState {
    MatrixXd gain;
    MatrixXd predicted_cov;  // fixed point of the Riccati map
    MatrixXd filtered_cov;
    std::size_t iterations = 0;
};

/// Iterates the Riccati map on the predicted covariance, starting from
/// F P0 F^T + Q, until max|M_{t+1} - M_t| < tol * max(1, max|M_t|).
/// Throws NoConvergence after max_iter iterations.
[[nodiscard]] SteadyState solve_steady_state(const MatrixXd& transition,
                                             const MatrixXd& observation,
                                             const MatrixXd& process_cov,
                                             const MatrixXd& meas_cov, double tol = 1e-10,
                                             std::size_t max_iter = 100000,
                                             const MatrixXd& p0 = MatrixXd());

[[nodiscard]] MatrixXd steady_state_gain(const MatrixXd& transition, const MatrixXd& observation,
                                         const MatrixXd& process_cov, const MatrixXd& meas_cov,
                                         double tol = 1e-10, std::size_t max_iter = 100000);

/// max|Riccati(M) - M| for a candidate predicted covariance M.
[[nodiscard]] double riccati_residual(const MatrixXd& transition, const MatrixXd& observation,
                                      const MatrixXd& process_cov, const MatrixXd& meas_cov,
                                      const MatrixXd& predicted_cov);

/// CSV: `step,k_0_0,k_0_1,...` with the gain entries row-major. A
/// steady-state schedule is written as a single row with step 0 and a
/// `# kind=steady_state` comment; preloaded schedules carry
/// `# kind=preloaded`.
void write_gain_schedule_csv(std::ostream& out, const GainSchedule& schedule,
                             const std::vector<std::string>& comments = {});

[[nodiscard]] GainSchedule read_gain_schedule_csv(std::istream& in);

}  // namespace gsf
