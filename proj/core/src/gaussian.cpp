#include "gsf/gaussian.hpp"

#include "gsf/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace gsf {
namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kPsdTol = 1e-9;
// the band is closed; the slack absorbs rounding in sums like 0.13 + 0.77 + 0.099
constexpr double kWeightSumTol = 1e-3 + 1e-12;

std::optional<MatrixXd> try_cholesky(const MatrixXd& cov) {
    Eigen::LLT<MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        return std::nullopt;
    }
    MatrixXd l = llt.matrixL();
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        if (!(l(i, i) > 0.0) || !std::isfinite(l(i, i))) {
            return std::nullopt;
        }
    }
    return l;
}

}  // namespace

Gaussian::Gaussian(VectorXd mean, MatrixXd cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
    const Eigen::Index d = mean_.size();
    if (d < 1) {
        throw InvalidArgument("Gaussian: dimension must be positive");
    }
    if (cov_.rows() != d || cov_.cols() != d) {
        throw InvalidArgument("Gaussian: covariance is " + std::to_string(cov_.rows()) + "x" +
                              std::to_string(cov_.cols()) + ", expected " + std::to_string(d) +
                              "x" + std::to_string(d));
    }
    if (!mean_.allFinite() || !cov_.allFinite()) {
        throw InvalidArgument("Gaussian: non-finite parameters");
    }
    const double scale = cov_.cwiseAbs().maxCoeff();
    if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
        throw InvalidArgument("Gaussian: covariance is not symmetric");
    }
    cov_ = 0.5 * (cov_ + cov_.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov_);
    const VectorXd& lambda = eig.eigenvalues();
    if (lambda.minCoeff() < -kPsdTol * std::max(1.0, lambda.cwiseAbs().maxCoeff())) {
        throw InvalidArgument("Gaussian: covariance is not positive semidefinite");
    }
    if (scale == 0.0) {
        sampling_factor_ = MatrixXd::Zero(d, d);
    } else {
        sampling_factor_ =
            eig.eigenvectors() * lambda.cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }

    cholesky_ = try_cholesky(cov_);
    if (!cholesky_) {
        const double jitter = 1e-12 * cov_.trace() / static_cast<double>(d);
        if (jitter > 0.0) {
            cholesky_ = try_cholesky(cov_ + jitter * MatrixXd::Identity(d, d));
        }
    }
    if (cholesky_) {
        const double log_det = 2.0 * cholesky_->diagonal().array().log().sum();
        log_normalizer_ =
            -0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + log_det);
    }
}

Gaussian Gaussian::scalar(double mean, double variance) {
    return Gaussian(VectorXd::Constant(1, mean), MatrixXd::Constant(1, 1, variance));
}

double log_density(const Gaussian& g, const VectorXd& x) {
    if (x.size() != g.dim()) {
        throw InvalidArgument("log_density: argument has dimension " + std::to_string(x.size()) +
                              ", expected " + std::to_string(g.dim()));
    }
    if (!g.cholesky_) {
        throw DegenerateCovariance("log_density: covariance is singular or indefinite");
    }
    const VectorXd y = g.cholesky_->triangularView<Eigen::Lower>().solve(x - g.mean_);
    return g.log_normalizer_ - 0.5 * y.squaredNorm();
}

VectorXd sample(const Gaussian& g, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    VectorXd eps(g.dim());
    for (Eigen::Index i = 0; i < eps.size(); ++i) {
        eps[i] = normal(rng);
    }
    return g.mean() + g.sampling_factor() * eps;
}

GaussianMixture::GaussianMixture(std::vector<double> weights, std::vector<Gaussian> components)
    : weights_(std::move(weights)), components_(std::move(components)) {
    if (components_.empty()) {
        throw InvalidArgument("GaussianMixture: at least one component required");
    }
    if (weights_.size() != components_.size()) {
        throw InvalidArgument("GaussianMixture: " + std::to_string(weights_.size()) +
                              " weights for " + std::to_string(components_.size()) +
                              " components");
    }
    const Eigen::Index d = components_.front().dim();
    for (const auto& c : components_) {
        if (c.dim() != d) {
            throw InvalidArgument("GaussianMixture: components differ in dimension");
        }
    }
    double total = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw InvalidArgument("GaussianMixture: weights must be finite and nonnegative");
        }
        total += w;
    }
    if (std::abs(total - 1.0) > kWeightSumTol) {
        throw InvalidArgument("GaussianMixture: weights sum to " + std::to_string(total));
    }
    for (double& w : weights_) {
        w /= total;
    }
    log_weights_.reserve(weights_.size());
    cumulative_.reserve(weights_.size());
    double running = 0.0;
    for (double w : weights_) {
        log_weights_.push_back(std::log(w));
        running += w;
        cumulative_.push_back(running);
    }
    cumulative_.back() = 1.0;
}

GaussianMixture::GaussianMixture(Gaussian component)
    : GaussianMixture(std::vector<double>{1.0}, std::vector<Gaussian>{std::move(component)}) {}

GaussianMixture GaussianMixture::scalar(std::vector<double> weights,
                                        const std::vector<double>& means,
                                        const std::vector<double>& variances) {
    if (means.size() != weights.size() || variances.size() != weights.size()) {
        throw InvalidArgument("GaussianMixture::scalar: parameter lists differ in length");
    }
    std::vector<Gaussian> components;
    components.reserve(means.size());
    for (std::size_t i = 0; i < means.size(); ++i) {
        components.push_back(Gaussian::scalar(means[i], variances[i]));
    }
    return GaussianMixture(std::move(weights), std::move(components));
}

MixtureDraw mixture_sample(const GaussianMixture& m, Rng& rng) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const double u = uniform(rng);
    const auto& cum = m.cumulative_weights();
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    // zero-weight clusters repeat the previous running sum, so upper_bound skips them
    const std::size_t index = it == cum.end() ? cum.size() - 1
                                              : static_cast<std::size_t>(it - cum.begin());
    return {index, sample(m.component(index), rng)};
}

double log_sum_exp(const std::vector<double>& values) {
    double peak = -std::numeric_limits<double>::infinity();
    for (double v : values) {
        peak = std::max(peak, v);
    }
    if (!std::isfinite(peak)) {
        return peak;
    }
    double acc = 0.0;
    for (double v : values) {
        acc += std::exp(v - peak);
    }
    return peak + std::log(acc);
}

double mixture_log_density(const GaussianMixture& m, const VectorXd& x) {
    std::vector<double> terms;
    terms.reserve(m.count());
    for (std::size_t i = 0; i < m.count(); ++i) {
        const double log_pdf = log_density(m.component(i), x);
        if (m.weights()[i] > 0.0) {
            terms.push_back(m.log_weights()[i] + log_pdf);
        }
    }
    return log_sum_exp(terms);
}

Gaussian moment_match(const GaussianMixture& m) {
    const Eigen::Index d = m.dim();
    VectorXd mean = VectorXd::Zero(d);
    for (std::size_t i = 0; i < m.count(); ++i) {
        mean += m.weights()[i] * m.component(i).mean();
    }
    MatrixXd cov = MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < m.count(); ++i) {
        const VectorXd offset = m.component(i).mean() - mean;
        cov += m.weights()[i] * (m.component(i).cov() + offset * offset.transpose());
    }
    cov = 0.5 * (cov + cov.transpose()).eval();
    return Gaussian(std::move(mean), std::move(cov));
}

KlEstimate kl_mc(const GaussianMixture& m, const Gaussian& g, std::size_t n_samples, Rng& rng) {
    if (n_samples == 0) {
        throw InvalidArgument("kl_mc: n_samples must be positive");
    }
    if (m.dim() != g.dim()) {
        throw InvalidArgument("kl_mc: mixture and Gaussian differ in dimension");
    }
    // Welford accumulation of log m(x) - log g(x).
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t s = 0; s < n_samples; ++s) {
        const VectorXd x = mixture_sample(m, rng).value;
        const double d = mixture_log_density(m, x) - log_density(g, x);
        const double delta = d - mean;
        mean += delta / static_cast<double>(s + 1);
        m2 += delta * (d - mean);
    }
    if (n_samples == 1) {
        return {mean, std::numeric_limits<double>::infinity()};
    }
    const double variance = m2 / static_cast<double>(n_samples - 1);
    return {mean, std::sqrt(variance / static_cast<double>(n_samples))};
}

}  // namespace gsf
