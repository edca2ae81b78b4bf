#pragma once

#include "gsf/kalman.hpp"
#include "gsf/state_space.hpp"

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <vector>

namespace gsf {

/// Mode-matched model M^{ij}: process cluster i paired with measurement
/// cluster j. Ordered lexicographically (i, then j).
struct ModelIndex {
    std::size_t i = 0;
    std::size_t j = 0;

    friend auto operator<=>(const ModelIndex&, const ModelIndex&) = default;
};

/// One member of the bank after the update at a step.
struct PosteriorEntry {
    ModelIndex index;
    double weight = 0.0;      // mu^{ij}, normalized
    double log_score = 0.0;   // log w^i + log p^j + log N(z; z_pred, S), unnormalized
    VectorXd prior_mean;      // F x + u^i
    MatrixXd prior_cov;       // F P F^T + Q^i
    VectorXd mean;            // x^{ij}_{k|k}
    MatrixXd cov;             // P^{ij}_{k|k}
    VectorXd predicted_measurement;  // z_pred^{ij}
    MatrixXd innovation_cov;         // S^{ij}
};

/// Gaussian-mixture posterior with C_v x C_w entries stored i-major
/// (entry i * C_w + j is model (i, j)). Weights sum to one.
class PosteriorMixture {
public:
    PosteriorMixture(std::vector<PosteriorEntry> entries, std::size_t process_clusters,
                     std::size_t measurement_clusters, std::size_t step);

    [[nodiscard]] const std::vector<PosteriorEntry>& entries() const { return entries_; }
    [[nodiscard]] const PosteriorEntry& entry(ModelIndex m) const;
    [[nodiscard]] std::size_t size() const { return entries_.size(); }
    [[nodiscard]] std::size_t process_clusters() const { return process_clusters_; }
    [[nodiscard]] std::size_t measurement_clusters() const { return measurement_clusters_; }
    /// Step index of the measurement this posterior has absorbed.
    [[nodiscard]] std::size_t step() const { return step_; }

    /// The posterior as a GaussianMixture over the state.
    [[nodiscard]] GaussianMixture as_mixture() const;

private:
    std::vector<PosteriorEntry> entries_;
    std::size_t process_clusters_;
    std::size_t measurement_clusters_;
    std::size_t step_;
};

struct InnovationParams {
    VectorXd predicted_measurement;  // H (F x + u^i) + b^j
    MatrixXd innovation_cov;         // H (F P F^T + Q^i) H^T + R^j
};

/// Innovation statistics of model (i, j) at `step` without running its update.
[[nodiscard]] InnovationParams innovation_params(const KalmanState& prev, const SystemModel& model,
                                                 std::size_t step, ModelIndex index);

/// One Gaussian Sum Filter step from a single-Gaussian prior: runs the
/// C_v x C_w mode-matched Kalman filters and weights them by
/// mu^{ij} proportional to w^i p^j N(z; z_pred^{ij}, S^{ij}), normalized in
/// log space. Entries whose weight underflows to zero are kept.
/// Throws DegenerateInnovation naming the offending (i, j).
[[nodiscard]] PosteriorMixture gsf_step(const KalmanState& prev, const SystemModel& model,
                                        const VectorXd& z, std::size_t step);

/// Debug dump: `i,j,weight,mean_0..,cov_0_0..` with covariance row-major.
void write_posterior_csv(std::ostream& out, const PosteriorMixture& posterior);

}  // namespace gsf
