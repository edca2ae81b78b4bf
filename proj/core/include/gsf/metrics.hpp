#pragma once

#include <span>

namespace gsf {

/// sqrt(mean(e^2)). Throws InvalidArgument on an empty list.
[[nodiscard]] double rmse(std::span<const double> errors);

/// Median of |e|; for an even count, the midpoint of the two middle values.
/// Throws InvalidArgument on an empty list.
[[nodiscard]] double cep(std::span<const double> errors);

struct MeanStderr {
    double mean;
    double std_error;  // sample sd / sqrt(n); 0 for n == 1
};

[[nodiscard]] MeanStderr mean_and_stderr(std::span<const double> values);

}  // namespace gsf
