#pragma once

#include "gsf/gaussian.hpp"
#include "gsf/state_space.hpp"

#include <optional>
#include <string_view>

namespace gsf {

/// Scalar process and measurement noise mixtures of one tracking axis.
struct NoisePair {
    GaussianMixture process;
    GaussianMixture measurement;
};

/// Synthetic benchmark models. All three use five unit-variance clusters
/// with means scaled by the separation parameter c, and the same mixture for
/// process and measurement noise:
///
///   model 1  w = [0.2, 0.2, 0.2, 0.2, 0.2]  m = c * [-50, -30, 0, 30, 50]
///   model 2  w = [0.1, 0.1, 0.6, 0.1, 0.1]  m = c * [-50, -30, 0, 30, 50]
///   model 3  w = [0.5, 0.1, 0.1, 0.1, 0.2]  m = c * [-50, 10, 30, 50, 80]
struct SyntheticModelSpec {
    int model_id = 1;
    double c = 1.0;
};

/// Throws InvalidArgument unless model_id is 1, 2 or 3 and c >= 0.
[[nodiscard]] NoisePair build_table1(int model_id, double c);

/// Random-walk-velocity system driven by the synthetic mixtures.
[[nodiscard]] SystemModel build_synthetic_model(const SyntheticModelSpec& spec,
                                                const TimeGrid& grid);

/// Noise mixtures fitted to the indoor UWB localization data, per axis.
/// The x-axis process weights are printed summing to 0.999 and are
/// renormalized on construction.
[[nodiscard]] NoisePair table2_x_noise();
[[nodiscard]] NoisePair table2_y_noise();

struct Table2Scenario {
    SystemModel x_axis;
    SystemModel y_axis;
};

/// Two independent one-axis tracking models (x: 3 x 3 clusters, y: 9 x 2).
[[nodiscard]] Table2Scenario build_table2_scenario(const TimeGrid& grid = TimeGrid::uniform(1000));

/// Noise of a named packaged scenario: "table2-x" or "table2-y".
[[nodiscard]] std::optional<NoisePair> scenario_noise(std::string_view id);

}  // namespace gsf
