#include "gsf/gsf_bank.hpp"

#include "gsf/csv.hpp"
#include "gsf/error.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

namespace gsf {

PosteriorMixture::PosteriorMixture(std::vector<PosteriorEntry> entries,
                                   std::size_t process_clusters,
                                   std::size_t measurement_clusters, std::size_t step)
    : entries_(std::move(entries)),
      process_clusters_(process_clusters),
      measurement_clusters_(measurement_clusters),
      step_(step) {
    if (entries_.empty() || entries_.size() != process_clusters_ * measurement_clusters_) {
        throw InvalidArgument("PosteriorMixture: expected C_v * C_w entries");
    }
    for (std::size_t n = 0; n < entries_.size(); ++n) {
        const ModelIndex expected{n / measurement_clusters_, n % measurement_clusters_};
        if (entries_[n].index != expected) {
            throw InvalidArgument("PosteriorMixture: entries must be stored i-major");
        }
    }
}

const PosteriorEntry& PosteriorMixture::entry(ModelIndex m) const {
    if (m.i >= process_clusters_ || m.j >= measurement_clusters_) {
        throw std::out_of_range("PosteriorMixture: model index out of range");
    }
    return entries_[m.i * measurement_clusters_ + m.j];
}

GaussianMixture PosteriorMixture::as_mixture() const {
    std::vector<double> weights;
    std::vector<Gaussian> components;
    weights.reserve(entries_.size());
    components.reserve(entries_.size());
    for (const auto& e : entries_) {
        weights.push_back(e.weight);
        components.emplace_back(e.mean, e.cov);
    }
    return GaussianMixture(std::move(weights), std::move(components));
}

InnovationParams innovation_params(const KalmanState& prev, const SystemModel& model,
                                   std::size_t step, ModelIndex index) {
    const StepModel& m = model.at(step);
    const Gaussian& v = m.process_noise->component(index.i);
    const Gaussian& w = m.measurement_noise->component(index.j);
    const Prediction prior = kf_predict(prev, m.transition, v.mean(), v.cov());
    InnovationParams out;
    out.predicted_measurement = m.observation * prior.mean + w.mean();
    const MatrixXd s = m.observation * prior.cov * m.observation.transpose() + w.cov();
    out.innovation_cov = 0.5 * (s + s.transpose());
    return out;
}

PosteriorMixture gsf_step(const KalmanState& prev, const SystemModel& model, const VectorXd& z,
                          std::size_t step) {
    const StepModel& m = model.at(step);
    const GaussianMixture& vs = *m.process_noise;
    const GaussianMixture& ws = *m.measurement_noise;
    if (prev.mean.size() != model.state_dim() || z.size() != model.meas_dim()) {
        throw InvalidArgument("gsf_step: state or measurement has wrong dimension");
    }
    const std::size_t cv = vs.count();
    const std::size_t cw = ws.count();
    const double log_2pi = std::log(2.0 * std::numbers::pi);
    const auto nz = static_cast<double>(model.meas_dim());

    // F P F^T is shared by every process cluster.
    const VectorXd fx = m.transition * prev.mean;
    const MatrixXd fpf = m.transition * prev.cov * m.transition.transpose();

    std::vector<PosteriorEntry> entries;
    entries.reserve(cv * cw);
    for (std::size_t i = 0; i < cv; ++i) {
        const Gaussian& v = vs.component(i);
        Prediction prior{fx + v.mean(), fpf + v.cov()};
        prior.cov = 0.5 * (prior.cov + prior.cov.transpose());
        for (std::size_t j = 0; j < cw; ++j) {
            const Gaussian& w = ws.component(j);
            KalmanUpdate upd = [&] {
                try {
                    return kf_update(prior, m.observation, w.mean(), w.cov(), z, step + 1);
                } catch (const DegenerateInnovation& e) {
                    throw DegenerateInnovation(e.what(), i, j);
                }
            }();
            const Eigen::LLT<MatrixXd> llt(upd.innovation_cov);
            const MatrixXd l = llt.matrixL();
            const VectorXd y = l.triangularView<Eigen::Lower>().solve(upd.innovation);
            const double log_det = 2.0 * l.diagonal().array().log().sum();
            const double log_lik = -0.5 * (nz * log_2pi + log_det + y.squaredNorm());

            PosteriorEntry e;
            e.index = {i, j};
            e.log_score = vs.log_weights()[i] + ws.log_weights()[j] + log_lik;
            e.prior_mean = prior.mean;
            e.prior_cov = prior.cov;
            e.mean = std::move(upd.state.mean);
            e.cov = std::move(upd.state.cov);
            e.predicted_measurement = m.observation * prior.mean + w.mean();
            e.innovation_cov = std::move(upd.innovation_cov);
            entries.push_back(std::move(e));
        }
    }

    std::vector<double> scores;
    scores.reserve(entries.size());
    for (const auto& e : entries) {
        scores.push_back(e.log_score);
    }
    const double norm = log_sum_exp(scores);
    if (!std::isfinite(norm)) {
        throw DegenerateInnovation("gsf_step: every model has zero likelihood");
    }
    double total = 0.0;
    for (auto& e : entries) {
        e.weight = std::exp(e.log_score - norm);
        total += e.weight;
    }
    for (auto& e : entries) {
        e.weight /= total;
    }
    return PosteriorMixture(std::move(entries), cv, cw, step);
}

void write_posterior_csv(std::ostream& out, const PosteriorMixture& posterior) {
    const auto& first = posterior.entries().front();
    const Eigen::Index n = first.mean.size();
    out << "i,j,weight";
    for (Eigen::Index r = 0; r < n; ++r) {
        out << ",mean_" << r;
    }
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            out << ",cov_" << r << '_' << c;
        }
    }
    out << '\n';
    for (const auto& e : posterior.entries()) {
        out << e.index.i << ',' << e.index.j << ',' << csv::format_double(e.weight);
        for (Eigen::Index r = 0; r < n; ++r) {
            out << ',' << csv::format_double(e.mean[r]);
        }
        for (Eigen::Index r = 0; r < n; ++r) {
            for (Eigen::Index c = 0; c < n; ++c) {
                out << ',' << csv::format_double(e.cov(r, c));
            }
        }
        out << '\n';
    }
}

}  // namespace gsf
