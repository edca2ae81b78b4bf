#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <random>
#include <vector>

namespace gsf {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Random source used throughout the library. Every operation that draws
/// takes one explicitly; there is no global generator.
using Rng = std::mt19937_64;

/// Multivariate normal N(mean, cov).
///
/// The covariance must be symmetric (1e-12 relative) and positive
/// semidefinite. Singular covariances are accepted: they can be sampled
/// (the draw collapses onto the support) but not evaluated as densities.
/// Factorizations are computed once at construction, so instances are cheap
/// to evaluate repeatedly and safe to share between threads.
class Gaussian {
public:
    Gaussian(VectorXd mean, MatrixXd cov);

    static Gaussian scalar(double mean, double variance);

    [[nodiscard]] const VectorXd& mean() const { return mean_; }
    [[nodiscard]] const MatrixXd& cov() const { return cov_; }
    [[nodiscard]] Eigen::Index dim() const { return mean_.size(); }

    /// L with L * L^T == cov (PSD square-root factor, used for sampling).
    [[nodiscard]] const MatrixXd& sampling_factor() const { return sampling_factor_; }

    /// True when the (possibly jittered) Cholesky factorization succeeded.
    [[nodiscard]] bool density_evaluable() const { return cholesky_.has_value(); }

private:
    friend double log_density(const Gaussian& g, const VectorXd& x);

    VectorXd mean_;
    MatrixXd cov_;
    MatrixXd sampling_factor_;
    std::optional<MatrixXd> cholesky_;  // lower-triangular
    double log_normalizer_ = 0.0;       // -0.5 * (d log 2pi + log det)
};

/// log N(x; g.mean, g.cov). Throws DegenerateCovariance when the covariance
/// is singular even after the one-shot jitter of 1e-12 * trace / dim.
[[nodiscard]] double log_density(const Gaussian& g, const VectorXd& x);

/// mean + L * eps with eps a vector of dim() standard normal draws.
[[nodiscard]] VectorXd sample(const Gaussian& g, Rng& rng);

/// Finite convex combination of same-dimension Gaussians.
///
/// Weights are renormalized when their sum lies within 1e-3 of one; a larger
/// deviation (or a negative weight) is a construction error.
class GaussianMixture {
public:
    GaussianMixture(std::vector<double> weights, std::vector<Gaussian> components);

    /// Single-component mixture.
    explicit GaussianMixture(Gaussian component);

    /// Scalar mixture from per-cluster weights, means and variances.
    static GaussianMixture scalar(std::vector<double> weights, const std::vector<double>& means,
                                  const std::vector<double>& variances);

    [[nodiscard]] const std::vector<double>& weights() const { return weights_; }
    [[nodiscard]] const std::vector<double>& log_weights() const { return log_weights_; }
    [[nodiscard]] const std::vector<Gaussian>& components() const { return components_; }
    [[nodiscard]] const Gaussian& component(std::size_t i) const { return components_.at(i); }
    [[nodiscard]] std::size_t count() const { return components_.size(); }
    [[nodiscard]] Eigen::Index dim() const { return components_.front().dim(); }

    /// Running sums of the weights; the last entry is exactly 1.
    [[nodiscard]] const std::vector<double>& cumulative_weights() const { return cumulative_; }

private:
    std::vector<double> weights_;
    std::vector<double> log_weights_;
    std::vector<double> cumulative_;
    std::vector<Gaussian> components_;
};

struct MixtureDraw {
    std::size_t index;
    VectorXd value;
};

/// Draws a cluster label from the weights, then a vector from that cluster.
[[nodiscard]] MixtureDraw mixture_sample(const GaussianMixture& m, Rng& rng);

/// log sum_i w_i N(x; mu_i, Sigma_i), evaluated with log-sum-exp.
[[nodiscard]] double mixture_log_density(const GaussianMixture& m, const VectorXd& x);

/// Gaussian with the mixture's mean and covariance.
[[nodiscard]] Gaussian moment_match(const GaussianMixture& m);

struct KlEstimate {
    double value;
    double std_error;
};

/// Monte-Carlo estimate of KL(m || g) from n_samples draws of m.
[[nodiscard]] KlEstimate kl_mc(const GaussianMixture& m, const Gaussian& g, std::size_t n_samples,
                               Rng& rng);

/// Numerically stable log(sum(exp(values))). Returns -inf for an empty or
/// all -inf input.
[[nodiscard]] double log_sum_exp(const std::vector<double>& values);

}  // namespace gsf
