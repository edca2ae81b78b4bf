#include "gsf/kalman.hpp"

#include "gsf/csv.hpp"
#include "gsf/error.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

namespace gsf {
namespace {

MatrixXd symmetrized(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

Eigen::LLT<MatrixXd> factor_innovation(const MatrixXd& s) {
    Eigen::LLT<MatrixXd> llt(s);
    if (llt.info() != Eigen::Success || !s.allFinite()) {
        throw DegenerateInnovation("innovation covariance is not positive definite");
    }
    return llt;
}

// Optimal gain P- H^T S^-1 and S for a prediction.
std::pair<MatrixXd, MatrixXd> optimal_gain(const MatrixXd& predicted_cov,
                                           const MatrixXd& observation, const MatrixXd& meas_cov) {
    const MatrixXd hp = observation * predicted_cov;
    MatrixXd s = symmetrized(hp * observation.transpose() + meas_cov);
    const auto llt = factor_innovation(s);
    MatrixXd gain = llt.solve(hp).transpose();
    return {std::move(gain), std::move(s)};
}

}  // namespace

Prediction kf_predict(const KalmanState& state, const MatrixXd& transition,
                      const VectorXd& process_mean, const MatrixXd& process_cov) {
    return {transition * state.mean + process_mean,
            symmetrized(transition * state.cov * transition.transpose() + process_cov)};
}

MatrixXd joseph_cov(const MatrixXd& predicted_cov, const MatrixXd& gain,
                    const MatrixXd& observation, const MatrixXd& meas_cov) {
    const Eigen::Index n = predicted_cov.rows();
    const MatrixXd a = MatrixXd::Identity(n, n) - gain * observation;
    return symmetrized(a * predicted_cov * a.transpose() + gain * meas_cov * gain.transpose());
}

KalmanUpdate kf_update(const Prediction& prior, const MatrixXd& observation,
                       const VectorXd& meas_mean, const MatrixXd& meas_cov, const VectorXd& z,
                       std::size_t next_step) {
    auto [gain, s] = optimal_gain(prior.cov, observation, meas_cov);
    VectorXd innovation = z - (observation * prior.mean + meas_mean);
    KalmanUpdate out;
    out.state.mean = prior.mean + gain * innovation;
    out.state.cov = joseph_cov(prior.cov, gain, observation, meas_cov);
    out.state.step = next_step;
    out.innovation = std::move(innovation);
    out.innovation_cov = std::move(s);
    out.gain = std::move(gain);
    return out;
}

KalmanUpdate kf_step(const KalmanState& state, const SystemModel& model, const VectorXd& z,
                     const Gaussian& vbar, const Gaussian& wbar) {
    const StepModel& m = model.at(state.step);
    const Prediction prior = kf_predict(state, m.transition, vbar.mean(), vbar.cov());
    return kf_update(prior, m.observation, wbar.mean(), wbar.cov(), z, state.step + 1);
}

KalmanState kf_step_with_gain(const KalmanState& state, const SystemModel& model,
                              const VectorXd& z, const Gaussian& vbar, const Gaussian& wbar,
                              const MatrixXd& gain) {
    const StepModel& m = model.at(state.step);
    if (gain.rows() != model.state_dim() || gain.cols() != model.meas_dim()) {
        throw InvalidArgument("kf_step_with_gain: gain has wrong shape");
    }
    const Prediction prior = kf_predict(state, m.transition, vbar.mean(), vbar.cov());
    const VectorXd innovation = z - (m.observation * prior.mean + wbar.mean());
    return {prior.mean + gain * innovation, joseph_cov(prior.cov, gain, m.observation, wbar.cov()),
            state.step + 1};
}

GainSchedule::GainSchedule(GainKind kind, std::vector<MatrixXd> gains)
    : kind_(kind), gains_(std::move(gains)) {
    if (gains_.empty()) {
        throw InvalidArgument("GainSchedule: no gains");
    }
    for (const auto& g : gains_) {
        if (g.rows() != gains_.front().rows() || g.cols() != gains_.front().cols()) {
            throw InvalidArgument("GainSchedule: gains differ in shape");
        }
    }
}

GainSchedule GainSchedule::preloaded(std::vector<MatrixXd> gains) {
    return GainSchedule(GainKind::preloaded, std::move(gains));
}

GainSchedule GainSchedule::steady_state(MatrixXd gain) {
    return GainSchedule(GainKind::steady_state, {std::move(gain)});
}

const MatrixXd& GainSchedule::at(std::size_t k) const {
    if (kind_ == GainKind::steady_state) {
        return gains_.front();
    }
    if (k >= gains_.size()) {
        throw MissingGains("preloaded gain schedule covers " + std::to_string(gains_.size()) +
                           " steps; step " + std::to_string(k) + " requested");
    }
    return gains_[k];
}

GainSchedule precompute_gains(const SystemModel& model, const Gaussian& noise_v,
                              const Gaussian& noise_w, const MatrixXd& p0, std::size_t horizon) {
    if (horizon == 0) {
        throw InvalidArgument("precompute_gains: horizon must be positive");
    }
    std::vector<MatrixXd> gains;
    gains.reserve(horizon);
    MatrixXd cov = p0;
    for (std::size_t k = 0; k < horizon; ++k) {
        const StepModel& m = model.at(k);
        const MatrixXd predicted =
            symmetrized(m.transition * cov * m.transition.transpose() + noise_v.cov());
        auto [gain, s] = optimal_gain(predicted, m.observation, noise_w.cov());
        cov = joseph_cov(predicted, gain, m.observation, noise_w.cov());
        gains.push_back(std::move(gain));
    }
    return GainSchedule::preloaded(std::move(gains));
}

GainSchedule precompute_gains(const SystemModel& model, const MatrixXd& p0, std::size_t horizon) {
    if (horizon == 0) {
        throw InvalidArgument("precompute_gains: horizon must be positive");
    }
    std::vector<MatrixXd> gains;
    gains.reserve(horizon);
    MatrixXd cov = p0;
    for (std::size_t k = 0; k < horizon; ++k) {
        const StepModel& m = model.at(k);
        const Gaussian v = moment_match(*m.process_noise);
        const Gaussian w = moment_match(*m.measurement_noise);
        const MatrixXd predicted =
            symmetrized(m.transition * cov * m.transition.transpose() + v.cov());
        auto [gain, s] = optimal_gain(predicted, m.observation, w.cov());
        cov = joseph_cov(predicted, gain, m.observation, w.cov());
        gains.push_back(std::move(gain));
    }
    return GainSchedule::preloaded(std::move(gains));
}

namespace {

MatrixXd riccati_map(const MatrixXd& f, const MatrixXd& h, const MatrixXd& q, const MatrixXd& r,
                     const MatrixXd& predicted) {
    auto [gain, s] = optimal_gain(predicted, h, r);
    const MatrixXd filtered = joseph_cov(predicted, gain, h, r);
    return symmetrized(f * filtered * f.transpose() + q);
}

}  // namespace

SteadyState solve_steady_state(const MatrixXd& transition, const MatrixXd& observation,
                               const MatrixXd& process_cov, const MatrixXd& meas_cov, double tol,
                               std::size_t max_iter, const MatrixXd& p0) {
    if (!(tol > 0.0)) {
        throw InvalidArgument("solve_steady_state: tol must be positive");
    }
    const Eigen::Index n = transition.rows();
    const MatrixXd start = p0.size() == 0 ? MatrixXd::Zero(n, n) : p0;
    MatrixXd predicted =
        symmetrized(transition * start * transition.transpose() + process_cov);
    for (std::size_t it = 1; it <= max_iter; ++it) {
        MatrixXd next = riccati_map(transition, observation, process_cov, meas_cov, predicted);
        const double scale = std::max(1.0, predicted.cwiseAbs().maxCoeff());
        const double change = (next - predicted).cwiseAbs().maxCoeff();
        predicted = std::move(next);
        if (change < tol * scale) {
            SteadyState out;
            auto [gain, s] = optimal_gain(predicted, observation, meas_cov);
            out.filtered_cov = joseph_cov(predicted, gain, observation, meas_cov);
            out.gain = std::move(gain);
            out.predicted_cov = predicted;
            out.iterations = it;
            return out;
        }
    }
    throw NoConvergence("steady-state Riccati iteration did not converge in " +
                        std::to_string(max_iter) + " iterations");
}

MatrixXd steady_state_gain(const MatrixXd& transition, const MatrixXd& observation,
                           const MatrixXd& process_cov, const MatrixXd& meas_cov, double tol,
                           std::size_t max_iter) {
    return solve_steady_state(transition, observation, process_cov, meas_cov, tol, max_iter).gain;
}

double riccati_residual(const MatrixXd& transition, const MatrixXd& observation,
                        const MatrixXd& process_cov, const MatrixXd& meas_cov,
                        const MatrixXd& predicted_cov) {
    return (riccati_map(transition, observation, process_cov, meas_cov, predicted_cov) -
            predicted_cov)
        .cwiseAbs()
        .maxCoeff();
}

void write_gain_schedule_csv(std::ostream& out, const GainSchedule& schedule,
                             const std::vector<std::string>& comments) {
    for (const auto& c : comments) {
        out << "# " << c << '\n';
    }
    out << "# kind=" << (schedule.kind() == GainKind::steady_state ? "steady_state" : "preloaded")
        << '\n';
    const MatrixXd& first = schedule.gains().front();
    out << "step";
    for (Eigen::Index r = 0; r < first.rows(); ++r) {
        for (Eigen::Index c = 0; c < first.cols(); ++c) {
            out << ",k_" << r << '_' << c;
        }
    }
    out << '\n';
    for (std::size_t k = 0; k < schedule.horizon(); ++k) {
        out << k;
        const MatrixXd& g = schedule.gains()[k];
        for (Eigen::Index r = 0; r < g.rows(); ++r) {
            for (Eigen::Index c = 0; c < g.cols(); ++c) {
                out << ',' << csv::format_double(g(r, c));
            }
        }
        out << '\n';
    }
}

GainSchedule read_gain_schedule_csv(std::istream& in) {
    GainKind kind = GainKind::preloaded;
    std::string line;
    std::size_t line_no = 0;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    bool have_header = false;
    std::vector<MatrixXd> gains;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            if (line == "# kind=steady_state") {
                kind = GainKind::steady_state;
            }
            continue;
        }
        const auto fields = csv::split(line);
        if (!have_header) {
            if (fields.front() != "step" || fields.size() < 2) {
                throw SchemaError("gain header must be step,k_r_c,...", line_no);
            }
            // last column name k_<r>_<c> fixes the shape
            const std::string_view last = fields.back();
            const auto sep = last.rfind('_');
            const auto r = csv::parse_integer(last.substr(2, sep - 2));
            const auto c = csv::parse_integer(last.substr(sep + 1));
            if (last.substr(0, 2) != "k_" || sep <= 2 || !r || !c) {
                throw SchemaError("malformed gain column '" + std::string(last) + "'", line_no);
            }
            rows = *r + 1;
            cols = *c + 1;
            if (static_cast<Eigen::Index>(fields.size()) != rows * cols + 1) {
                throw SchemaError("gain column count does not match shape", line_no);
            }
            have_header = true;
            continue;
        }
        if (static_cast<Eigen::Index>(fields.size()) != rows * cols + 1) {
            throw SchemaError("wrong number of gain entries", line_no);
        }
        const auto step = csv::parse_integer(fields[0]);
        if (!step || *step != static_cast<long long>(gains.size())) {
            throw SchemaError("steps must count up from 0", line_no);
        }
        MatrixXd g(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                const auto v = csv::parse_double(fields[static_cast<std::size_t>(1 + r * cols + c)]);
                if (!v) {
                    throw SchemaError("gain entry is not a number", line_no);
                }
                g(r, c) = *v;
            }
        }
        gains.push_back(std::move(g));
    }
    if (gains.empty()) {
        throw SchemaError("no gain rows", line_no);
    }
    if (kind == GainKind::steady_state) {
        if (gains.size() != 1) {
            throw SchemaError("steady-state schedule must have exactly one row", line_no);
        }
        return GainSchedule::steady_state(std::move(gains.front()));
    }
    return GainSchedule::preloaded(std::move(gains));
}

}  // namespace gsf
