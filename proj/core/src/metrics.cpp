#include "gsf/metrics.hpp"

#include "gsf/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace gsf {

double rmse(std::span<const double> errors) {
    if (errors.empty()) {
        throw InvalidArgument("rmse: empty error list");
    }
    double acc = 0.0;
    for (double e : errors) {
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(errors.size()));
}

double cep(std::span<const double> errors) {
    if (errors.empty()) {
        throw InvalidArgument("cep: empty error list");
    }
    std::vector<double> abs_errors;
    abs_errors.reserve(errors.size());
    for (double e : errors) {
        abs_errors.push_back(std::abs(e));
    }
    const std::size_t n = abs_errors.size();
    const std::size_t mid = n / 2;
    std::nth_element(abs_errors.begin(), abs_errors.begin() + static_cast<long>(mid),
                     abs_errors.end());
    const double upper = abs_errors[mid];
    if (n % 2 == 1) {
        return upper;
    }
    const double lower = *std::max_element(abs_errors.begin(),
                                           abs_errors.begin() + static_cast<long>(mid));
    return 0.5 * (lower + upper);
}

MeanStderr mean_and_stderr(std::span<const double> values) {
    if (values.empty()) {
        throw InvalidArgument("mean_and_stderr: empty list");
    }
    const auto n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) {
        mean += v;
    }
    mean /= n;
    if (values.size() == 1) {
        return {mean, 0.0};
    }
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace gsf
