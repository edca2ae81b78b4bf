#include "gsf/state_space.hpp"

#include "gsf/error.hpp"

#include <cmath>
#include <map>
#include <string>

namespace gsf {

std::optional<unsigned> tick_multiple(double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        return std::nullopt;
    }
    const double ratio = dt / kTick;
    const double nearest = std::round(ratio);
    if (nearest < 1.0 || std::abs(dt - nearest * kTick) > 1e-9) {
        return std::nullopt;
    }
    return static_cast<unsigned>(nearest);
}

TimeGrid::TimeGrid(std::vector<double> dts) : dts_(std::move(dts)) {
    ticks_.reserve(dts_.size());
    for (std::size_t k = 0; k < dts_.size(); ++k) {
        const auto ticks = tick_multiple(dts_[k]);
        if (!ticks) {
            throw InvalidArgument("TimeGrid: dt[" + std::to_string(k) + "] = " +
                                  std::to_string(dts_[k]) + " is not a multiple of 0.1080");
        }
        ticks_.push_back(*ticks);
    }
}

TimeGrid TimeGrid::uniform(std::size_t steps, unsigned ticks) {
    if (ticks == 0) {
        throw InvalidArgument("TimeGrid::uniform: ticks must be positive");
    }
    return TimeGrid(std::vector<double>(steps, ticks * kTick));
}

bool TimeGrid::is_constant() const {
    for (unsigned t : ticks_) {
        if (t != ticks_.front()) {
            return false;
        }
    }
    return true;
}

SystemModel::SystemModel(std::vector<StepModel> steps, bool invariant)
    : steps_(std::move(steps)), invariant_(invariant) {
    if (steps_.empty()) {
        throw InvalidArgument("SystemModel: no steps");
    }
    state_dim_ = steps_.front().transition.rows();
    meas_dim_ = steps_.front().observation.rows();
    if (state_dim_ < 1 || meas_dim_ < 1) {
        throw InvalidArgument("SystemModel: empty state or measurement space");
    }
    for (std::size_t k = 0; k < steps_.size(); ++k) {
        const StepModel& s = steps_[k];
        const std::string where = "SystemModel step " + std::to_string(k) + ": ";
        if (s.transition.rows() != state_dim_ || s.transition.cols() != state_dim_) {
            throw InvalidArgument(where + "transition matrix has wrong shape");
        }
        if (s.observation.rows() != meas_dim_ || s.observation.cols() != state_dim_) {
            throw InvalidArgument(where + "observation matrix has wrong shape");
        }
        if (!s.process_noise || s.process_noise->dim() != state_dim_) {
            throw InvalidArgument(where + "process noise missing or of wrong dimension");
        }
        if (!s.measurement_noise || s.measurement_noise->dim() != meas_dim_) {
            throw InvalidArgument(where + "measurement noise missing or of wrong dimension");
        }
        if (s.lifted_process_noise) {
            const auto& lifted = *s.lifted_process_noise;
            if (lifted.direction.size() != state_dim_ || lifted.scalar.dim() != 1 ||
                lifted.scalar.count() != s.process_noise->count() ||
                lifted.direction.squaredNorm() == 0.0) {
                throw InvalidArgument(where + "lifted process noise inconsistent");
            }
        }
    }
}

SystemModel SystemModel::time_invariant(MatrixXd transition, MatrixXd observation,
                                        GaussianMixture process_noise,
                                        GaussianMixture measurement_noise) {
    StepModel step{std::move(transition), std::move(observation),
                   std::make_shared<const GaussianMixture>(std::move(process_noise)),
                   std::make_shared<const GaussianMixture>(std::move(measurement_noise)),
                   nullptr};
    return SystemModel({std::move(step)}, true);
}

SystemModel SystemModel::time_varying(std::vector<StepModel> steps) {
    return SystemModel(std::move(steps), false);
}

std::optional<std::size_t> SystemModel::horizon() const {
    if (invariant_) {
        return std::nullopt;
    }
    return steps_.size();
}

const StepModel& SystemModel::at(std::size_t k) const {
    if (invariant_) {
        return steps_.front();
    }
    if (k >= steps_.size()) {
        throw std::out_of_range("SystemModel: step " + std::to_string(k) +
                                " beyond horizon " + std::to_string(steps_.size()));
    }
    return steps_[k];
}

SystemModel rw_velocity_model(const GaussianMixture& scalar_process,
                              const GaussianMixture& measurement, const TimeGrid& grid) {
    if (grid.empty()) {
        throw InvalidArgument("rw_velocity_model: empty time grid");
    }
    if (scalar_process.dim() != 1 || measurement.dim() != 1) {
        throw InvalidArgument("rw_velocity_model: noise mixtures must be scalar");
    }
    const MatrixXd observation = (MatrixXd(1, 2) << 1.0, 0.0).finished();
    const auto meas = std::make_shared<const GaussianMixture>(measurement);

    struct PerTick {
        MatrixXd transition;
        std::shared_ptr<const GaussianMixture> process;
        std::shared_ptr<const LiftedScalarNoise> lifted;
    };
    std::map<unsigned, PerTick> cache;

    std::vector<StepModel> steps;
    steps.reserve(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        auto [it, inserted] = cache.try_emplace(grid.ticks(k));
        if (inserted) {
            const double dt = grid.dt(k);
            const VectorXd g = (VectorXd(2) << dt, 1.0).finished();
            const MatrixXd outer = g * g.transpose();
            std::vector<Gaussian> clusters;
            clusters.reserve(scalar_process.count());
            for (const Gaussian& c : scalar_process.components()) {
                clusters.emplace_back(c.mean()[0] * g, c.cov()(0, 0) * outer);
            }
            it->second.transition = (MatrixXd(2, 2) << 1.0, dt, 0.0, 1.0).finished();
            it->second.process = std::make_shared<const GaussianMixture>(
                scalar_process.weights(), std::move(clusters));
            it->second.lifted =
                std::make_shared<const LiftedScalarNoise>(LiftedScalarNoise{g, scalar_process});
        }
        steps.push_back(
            {it->second.transition, observation, it->second.process, meas, it->second.lifted});
    }
    return SystemModel::time_varying(std::move(steps));
}

void Trajectory::validate() const {
    const std::size_t n = measurements.size();
    if (grid.size() != n) {
        throw InvalidArgument("Trajectory: grid has " + std::to_string(grid.size()) +
                              " steps for " + std::to_string(n) + " measurements");
    }
    if (!states.empty() && states.size() != n) {
        throw InvalidArgument("Trajectory: state count differs from measurement count");
    }
    if (active_v.size() != active_w.size() || (!active_v.empty() && active_v.size() != n)) {
        throw InvalidArgument("Trajectory: active label counts differ from measurement count");
    }
}

bool operator==(const Trajectory& a, const Trajectory& b) {
    auto same = [](const std::vector<VectorXd>& x, const std::vector<VectorXd>& y) {
        if (x.size() != y.size()) {
            return false;
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i].size() != y[i].size() || x[i] != y[i]) {
                return false;
            }
        }
        return true;
    };
    return a.grid == b.grid && a.active_v == b.active_v && a.active_w == b.active_w &&
           same(a.states, b.states) && same(a.measurements, b.measurements);
}

SimulationRecord simulate_with_noise(const SystemModel& model, const VectorXd& x0,
                                     const TimeGrid& grid, Rng& rng) {
    if (x0.size() != model.state_dim()) {
        throw InvalidArgument("simulate: x0 has dimension " + std::to_string(x0.size()) +
                              ", expected " + std::to_string(model.state_dim()));
    }
    if (const auto h = model.horizon(); h && *h < grid.size()) {
        throw InvalidArgument("simulate: grid longer than model horizon");
    }
    SimulationRecord rec;
    Trajectory& t = rec.trajectory;
    const std::size_t n = grid.size();
    t.grid = grid;
    t.states.reserve(n);
    t.measurements.reserve(n);
    t.active_v.reserve(n);
    t.active_w.reserve(n);
    rec.process_draws.reserve(n);
    rec.measurement_draws.reserve(n);

    VectorXd x = x0;
    for (std::size_t k = 0; k < n; ++k) {
        const StepModel& step = model.at(k);
        MixtureDraw v = mixture_sample(*step.process_noise, rng);
        MixtureDraw w = mixture_sample(*step.measurement_noise, rng);
        x = step.transition * x + v.value;
        VectorXd z = step.observation * x + w.value;
        t.states.push_back(x);
        t.measurements.push_back(std::move(z));
        t.active_v.push_back(v.index);
        t.active_w.push_back(w.index);
        rec.process_draws.push_back(std::move(v.value));
        rec.measurement_draws.push_back(std::move(w.value));
    }
    return rec;
}

Trajectory simulate(const SystemModel& model, const VectorXd& x0, const TimeGrid& grid,
                    Rng& rng) {
    return simulate_with_noise(model, x0, grid, rng).trajectory;
}

}  // namespace gsf
