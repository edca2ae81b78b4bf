#include "gsf/reduction.hpp"

#include "gsf/error.hpp"

#include <cmath>
#include <limits>

namespace gsf {
namespace {

std::size_t first_argmax(const std::vector<double>& values) {
    std::size_t best = 0;
    for (std::size_t n = 1; n < values.size(); ++n) {
        if (values[n] > values[best]) {
            best = n;
        }
    }
    return best;
}

ReducedPosterior keep_entry(const PosteriorMixture& p, ModelIndex m) {
    const PosteriorEntry& e = p.entry(m);
    ReducedPosterior out;
    out.state = {e.mean, e.cov, p.step() + 1};
    out.chosen = m;
    return out;
}

VectorXd merged_mean(const PosteriorMixture& p) {
    VectorXd mean = VectorXd::Zero(p.entries().front().mean.size());
    for (const auto& e : p.entries()) {
        mean += e.weight * e.mean;
    }
    return mean;
}

ModelIndex highest_weight(const PosteriorMixture& p) {
    std::size_t best = 0;
    const auto& entries = p.entries();
    for (std::size_t n = 1; n < entries.size(); ++n) {
        if (entries[n].weight > entries[best].weight) {
            best = n;
        }
    }
    return entries[best].index;
}

// Bank means re-updated with externally supplied gains, then merged with the
// bank weights.
VectorXd gain_driven_estimate(const PosteriorMixture& p, const VectorXd& z,
                              const BankGains& gains) {
    VectorXd mean = VectorXd::Zero(p.entries().front().mean.size());
    for (const auto& e : p.entries()) {
        const MatrixXd& k = gains.gain(e.index, p.step());
        mean += e.weight * (e.prior_mean + k * (z - e.predicted_measurement));
    }
    return mean;
}

}  // namespace

std::string_view to_string(InitEstimator e) {
    switch (e) {
        case InitEstimator::gsfm: return "gsfm";
        case InitEstimator::gsfr: return "gsfr";
        case InitEstimator::pkg: return "pkg";
        case InitEstimator::ssg: return "ssg";
        case InitEstimator::dkg: return "dkg";
    }
    return "?";
}

std::string_view to_string(ReductionKind k) {
    switch (k) {
        case ReductionKind::merge: return "merge";
        case ReductionKind::remove: return "remove";
        case ReductionKind::matched: return "matched";
        case ReductionKind::proposed: return "proposed";
    }
    return "?";
}

BankGains::BankGains(std::vector<GainSchedule> schedules, bool shared, std::size_t cv,
                     std::size_t cw)
    : schedules_(std::move(schedules)),
      shared_(shared),
      process_clusters_(cv),
      measurement_clusters_(cw) {
    if (shared_ ? schedules_.size() != 1 : schedules_.size() != cv * cw || schedules_.empty()) {
        throw InvalidArgument("BankGains: schedule count does not match the bank");
    }
}

BankGains BankGains::shared(GainSchedule schedule) {
    return BankGains({std::move(schedule)}, true, 0, 0);
}

BankGains BankGains::per_model(std::vector<GainSchedule> schedules, std::size_t process_clusters,
                               std::size_t measurement_clusters) {
    return BankGains(std::move(schedules), false, process_clusters, measurement_clusters);
}

const GainSchedule& BankGains::schedule(ModelIndex m) const {
    if (shared_) {
        return schedules_.front();
    }
    if (m.i >= process_clusters_ || m.j >= measurement_clusters_) {
        throw MissingGains("no offline gains for model (" + std::to_string(m.i) + ", " +
                           std::to_string(m.j) + ")");
    }
    return schedules_[m.i * measurement_clusters_ + m.j];
}

BankGains preloaded_shared_gains(const SystemModel& model, const MatrixXd& p0,
                                 std::size_t horizon) {
    return BankGains::shared(precompute_gains(model, p0, horizon));
}

BankGains preloaded_per_model_gains(const SystemModel& model, const MatrixXd& p0,
                                    std::size_t horizon) {
    const std::size_t cv = model.process_noise(0).count();
    const std::size_t cw = model.measurement_noise(0).count();
    std::vector<GainSchedule> schedules;
    schedules.reserve(cv * cw);
    for (std::size_t i = 0; i < cv; ++i) {
        for (std::size_t j = 0; j < cw; ++j) {
            std::vector<MatrixXd> gains;
            gains.reserve(horizon);
            MatrixXd cov = p0;
            for (std::size_t k = 0; k < horizon; ++k) {
                const StepModel& m = model.at(k);
                if (m.process_noise->count() != cv || m.measurement_noise->count() != cw) {
                    throw InvalidArgument(
                        "preloaded_per_model_gains: cluster counts change over time");
                }
                const KalmanState belief{VectorXd::Zero(model.state_dim()), cov, k};
                const Prediction prior =
                    kf_predict(belief, m.transition, VectorXd::Zero(model.state_dim()),
                               m.process_noise->component(i).cov());
                const auto& r = m.measurement_noise->component(j).cov();
                const KalmanUpdate upd =
                    kf_update(prior, m.observation, VectorXd::Zero(model.meas_dim()), r,
                              VectorXd::Zero(model.meas_dim()), k + 1);
                cov = upd.state.cov;
                gains.push_back(upd.gain);
            }
            schedules.push_back(GainSchedule::preloaded(std::move(gains)));
        }
    }
    return BankGains::per_model(std::move(schedules), cv, cw);
}

BankGains steady_state_bank_gains(const SystemModel& model, std::size_t step, double tol,
                                  std::size_t max_iter) {
    const StepModel& m = model.at(step);
    const std::size_t cv = m.process_noise->count();
    const std::size_t cw = m.measurement_noise->count();
    std::vector<GainSchedule> schedules;
    schedules.reserve(cv * cw);
    for (std::size_t i = 0; i < cv; ++i) {
        for (std::size_t j = 0; j < cw; ++j) {
            schedules.push_back(GainSchedule::steady_state(steady_state_gain(
                m.transition, m.observation, m.process_noise->component(i).cov(),
                m.measurement_noise->component(j).cov(), tol, max_iter)));
        }
    }
    return BankGains::per_model(std::move(schedules), cv, cw);
}

ReductionScheme::ReductionScheme(ReductionKind kind, std::optional<InitEstimator> estimator,
                                 std::shared_ptr<const BankGains> gains)
    : kind_(kind), estimator_(estimator), gains_(std::move(gains)) {}

ReductionScheme ReductionScheme::merge() { return {ReductionKind::merge, std::nullopt, nullptr}; }
ReductionScheme ReductionScheme::remove() {
    return {ReductionKind::remove, std::nullopt, nullptr};
}
ReductionScheme ReductionScheme::matched() {
    return {ReductionKind::matched, std::nullopt, nullptr};
}

ReductionScheme ReductionScheme::proposed(InitEstimator estimator) {
    if (estimator == InitEstimator::pkg || estimator == InitEstimator::ssg) {
        throw MissingGains("proposed:" + std::string(to_string(estimator)) +
                           " requires an offline gain schedule");
    }
    return {ReductionKind::proposed, estimator, nullptr};
}

ReductionScheme ReductionScheme::proposed(InitEstimator estimator, BankGains gains) {
    if (estimator != InitEstimator::pkg && estimator != InitEstimator::ssg) {
        throw InvalidArgument("proposed:" + std::string(to_string(estimator)) +
                              " does not take gains");
    }
    return {ReductionKind::proposed, estimator,
            std::make_shared<const BankGains>(std::move(gains))};
}

std::string ReductionScheme::name() const {
    std::string out(to_string(kind_));
    if (estimator_) {
        out += ':';
        out += to_string(*estimator_);
    }
    return out;
}

SchemeId parse_scheme_id(std::string_view text) {
    if (text == "merge") return {ReductionKind::merge, std::nullopt};
    if (text == "remove") return {ReductionKind::remove, std::nullopt};
    if (text == "matched") return {ReductionKind::matched, std::nullopt};
    constexpr std::string_view prefix = "proposed:";
    if (text.starts_with(prefix)) {
        const std::string_view rest = text.substr(prefix.size());
        for (InitEstimator e : {InitEstimator::gsfm, InitEstimator::gsfr, InitEstimator::pkg,
                                InitEstimator::ssg, InitEstimator::dkg}) {
            if (rest == to_string(e)) {
                return {ReductionKind::proposed, e};
            }
        }
    }
    throw InvalidArgument("unknown reduction scheme '" + std::string(text) +
                          "' (expected merge, remove, matched or "
                          "proposed:{gsfm,gsfr,pkg,ssg,dkg})");
}

ReducedPosterior reduce_merge(const PosteriorMixture& p) {
    const VectorXd mean = merged_mean(p);
    const Eigen::Index n = mean.size();
    MatrixXd cov = MatrixXd::Zero(n, n);
    for (const auto& e : p.entries()) {
        const VectorXd offset = e.mean - mean;
        cov += e.weight * (e.cov + offset * offset.transpose());
    }
    ReducedPosterior out;
    out.state = {mean, 0.5 * (cov + cov.transpose()), p.step() + 1};
    return out;
}

ReducedPosterior reduce_remove(const PosteriorMixture& p) {
    return keep_entry(p, highest_weight(p));
}

ReducedPosterior reduce_matched(const PosteriorMixture& p, std::optional<ModelIndex> truth) {
    if (!truth) {
        throw MissingTruth("matched reduction needs the true active model labels");
    }
    return keep_entry(p, *truth);
}

VectorXd initial_estimate(InitEstimator estimator, const PosteriorMixture& p,
                          const KalmanState& prev, const SystemModel& model, const VectorXd& z,
                          std::size_t step, const BankGains* gains) {
    switch (estimator) {
        case InitEstimator::gsfm:
            return merged_mean(p);
        case InitEstimator::gsfr:
            return p.entry(highest_weight(p)).mean;
        case InitEstimator::pkg:
        case InitEstimator::ssg:
            if (gains == nullptr) {
                throw MissingGains("proposed:" + std::string(to_string(estimator)) +
                                   " requires an offline gain schedule");
            }
            return gain_driven_estimate(p, z, *gains);
        case InitEstimator::dkg: {
            const StepModel& m = model.at(step);
            const Gaussian v = moment_match(*m.process_noise);
            const Gaussian w = moment_match(*m.measurement_noise);
            const KalmanState from{prev.mean, prev.cov, step};
            return kf_step(from, model, z, v, w).state.mean;
        }
    }
    throw InvalidArgument("initial_estimate: unknown estimator");
}

ActiveScores active_scores(const VectorXd& init_estimate, const VectorXd& prev_mean,
                           const VectorXd& z, const SystemModel& model, std::size_t step) {
    const StepModel& m = model.at(step);
    const VectorXd v_check = init_estimate - m.transition * prev_mean;
    const VectorXd w_check = z - m.observation * init_estimate;

    ActiveScores scores;
    const GaussianMixture& vs = *m.process_noise;
    scores.process.reserve(vs.count());
    if (m.lifted_process_noise) {
        const LiftedScalarNoise& lifted = *m.lifted_process_noise;
        const double s = lifted.direction.dot(v_check) / lifted.direction.squaredNorm();
        const VectorXd coord = VectorXd::Constant(1, s);
        for (std::size_t i = 0; i < vs.count(); ++i) {
            scores.process.push_back(lifted.scalar.log_weights()[i] +
                                     log_density(lifted.scalar.component(i), coord));
        }
    } else {
        for (std::size_t i = 0; i < vs.count(); ++i) {
            scores.process.push_back(vs.log_weights()[i] + log_density(vs.component(i), v_check));
        }
    }
    const GaussianMixture& ws = *m.measurement_noise;
    scores.measurement.reserve(ws.count());
    for (std::size_t j = 0; j < ws.count(); ++j) {
        scores.measurement.push_back(ws.log_weights()[j] + log_density(ws.component(j), w_check));
    }
    return scores;
}

ModelIndex select_active(const VectorXd& init_estimate, const VectorXd& prev_mean,
                         const VectorXd& z, const SystemModel& model, std::size_t step) {
    const ActiveScores scores = active_scores(init_estimate, prev_mean, z, model, step);
    return {first_argmax(scores.process), first_argmax(scores.measurement)};
}

ReducedPosterior reduce_proposed(const PosteriorMixture& p, const KalmanState& prev,
                                 const SystemModel& model, const VectorXd& z, std::size_t step,
                                 const ReductionScheme& scheme) {
    if (scheme.kind() != ReductionKind::proposed || !scheme.estimator()) {
        throw InvalidArgument("reduce_proposed: scheme is not a proposed scheme");
    }
    VectorXd x_check =
        initial_estimate(*scheme.estimator(), p, prev, model, z, step, scheme.gains());
    const ModelIndex active = select_active(x_check, prev.mean, z, model, step);
    ReducedPosterior out = keep_entry(p, active);
    out.init_estimate = std::move(x_check);
    return out;
}

ReducedPosterior reduce(const ReductionScheme& scheme, const PosteriorMixture& p,
                        const KalmanState& prev, const SystemModel& model, const VectorXd& z,
                        std::optional<ModelIndex> truth) {
    switch (scheme.kind()) {
        case ReductionKind::merge: return reduce_merge(p);
        case ReductionKind::remove: return reduce_remove(p);
        case ReductionKind::matched: return reduce_matched(p, truth);
        case ReductionKind::proposed:
            return reduce_proposed(p, prev, model, z, p.step(), scheme);
    }
    throw InvalidArgument("reduce: unknown scheme");
}

}  // namespace gsf
