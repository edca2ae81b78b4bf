#pragma once

#include "gsf/gaussian.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

namespace gsf {

/// Base measurement interval of the tracking system, in seconds. Every
/// inter-measurement interval is a positive integer multiple of it.
inline constexpr double kTick = 0.1080;

/// Sequence of inter-measurement intervals dt_k (seconds).
class TimeGrid {
public:
    /// Throws InvalidArgument unless every dt is a positive multiple of kTick
    /// within 1e-9.
    explicit TimeGrid(std::vector<double> dts);

    static TimeGrid uniform(std::size_t steps, unsigned ticks = 1);

    [[nodiscard]] std::size_t size() const { return dts_.size(); }
    [[nodiscard]] bool empty() const { return dts_.empty(); }
    [[nodiscard]] double dt(std::size_t k) const { return dts_.at(k); }
    [[nodiscard]] unsigned ticks(std::size_t k) const { return ticks_.at(k); }
    [[nodiscard]] const std::vector<double>& dts() const { return dts_; }
    [[nodiscard]] bool is_constant() const;

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    std::vector<double> dts_;
    std::vector<unsigned> ticks_;
};

/// Returns the tick multiple of dt, or nullopt if dt is not a positive
/// integer multiple of kTick within 1e-9.
[[nodiscard]] std::optional<unsigned> tick_multiple(double dt);

/// A vector noise that is a scalar mixture lifted along a fixed direction:
/// v = s * direction with s drawn from `scalar`. The random-walk-velocity
/// process noise has this form, and its lifted covariance is rank one.
struct LiftedScalarNoise {
    VectorXd direction;
    GaussianMixture scalar;
};

/// Matrices and noise models in force at one step.
struct StepModel {
    MatrixXd transition;   // F_k
    MatrixXd observation;  // H_k
    std::shared_ptr<const GaussianMixture> process_noise;
    std::shared_ptr<const GaussianMixture> measurement_noise;
    std::shared_ptr<const LiftedScalarNoise> lifted_process_noise;  // optional
};

/// Linear state-space system x_k = F_k x_{k-1} + v_k, z_k = H_k x_k + w_k
/// with Gaussian-mixture v_k and w_k.
///
/// Steps are 0-based: step k maps the state after k measurements to the
/// state at the (k+1)-th measurement. A time-invariant model answers every
/// step; a time-varying one covers [0, horizon()).
class SystemModel {
public:
    static SystemModel time_invariant(MatrixXd transition, MatrixXd observation,
                                      GaussianMixture process_noise,
                                      GaussianMixture measurement_noise);

    static SystemModel time_varying(std::vector<StepModel> steps);

    [[nodiscard]] Eigen::Index state_dim() const { return state_dim_; }
    [[nodiscard]] Eigen::Index meas_dim() const { return meas_dim_; }

    /// Number of steps covered, or nullopt for a time-invariant model.
    [[nodiscard]] std::optional<std::size_t> horizon() const;

    [[nodiscard]] const StepModel& at(std::size_t k) const;
    [[nodiscard]] const MatrixXd& transition(std::size_t k) const { return at(k).transition; }
    [[nodiscard]] const MatrixXd& observation(std::size_t k) const { return at(k).observation; }
    [[nodiscard]] const GaussianMixture& process_noise(std::size_t k) const {
        return *at(k).process_noise;
    }
    [[nodiscard]] const GaussianMixture& measurement_noise(std::size_t k) const {
        return *at(k).measurement_noise;
    }
    [[nodiscard]] const LiftedScalarNoise* lifted_process_noise(std::size_t k) const {
        return at(k).lifted_process_noise.get();
    }

private:
    SystemModel(std::vector<StepModel> steps, bool invariant);

    std::vector<StepModel> steps_;
    bool invariant_ = false;
    Eigen::Index state_dim_ = 0;
    Eigen::Index meas_dim_ = 0;
};

/// Random-walk-velocity tracking model for one axis: state [position,
/// velocity], F = [[1, dt], [0, 1]], H = [1, 0]. Each scalar process cluster
/// (u, s^2) becomes mean u * [dt, 1] and covariance s^2 * [[dt^2, dt], [dt, 1]].
[[nodiscard]] SystemModel rw_velocity_model(const GaussianMixture& scalar_process,
                                            const GaussianMixture& measurement,
                                            const TimeGrid& grid);

/// Ground-truth run: states x_1..x_N, measurements z_1..z_N, and the active
/// noise clusters that generated each step.
///
/// Ingested trajectories may lack ground truth; `states` and the label
/// vectors are then empty rather than length N.
struct Trajectory {
    std::vector<VectorXd> states;
    std::vector<VectorXd> measurements;
    std::vector<std::size_t> active_v;
    std::vector<std::size_t> active_w;
    TimeGrid grid{std::vector<double>{}};

    [[nodiscard]] std::size_t size() const { return measurements.size(); }
    [[nodiscard]] bool has_truth() const { return !states.empty(); }
    [[nodiscard]] bool has_labels() const { return !active_v.empty(); }

    /// Throws InvalidArgument when list lengths disagree.
    void validate() const;

    friend bool operator==(const Trajectory& a, const Trajectory& b);
};

/// Simulated trajectory plus the raw noise draws behind it.
struct SimulationRecord {
    Trajectory trajectory;
    std::vector<VectorXd> process_draws;
    std::vector<VectorXd> measurement_draws;
};

[[nodiscard]] SimulationRecord simulate_with_noise(const SystemModel& model, const VectorXd& x0,
                                                   const TimeGrid& grid, Rng& rng);

[[nodiscard]] Trajectory simulate(const SystemModel& model, const VectorXd& x0,
                                  const TimeGrid& grid, Rng& rng);

}  // namespace gsf
