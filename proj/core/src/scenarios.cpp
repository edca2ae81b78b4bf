#include "gsf/scenarios.hpp"

#include "gsf/error.hpp"

#include <array>
#include <cmath>
#include <string>

namespace gsf {
namespace {

struct Table1Row {
    std::array<double, 5> weights;
    std::array<double, 5> means;
};

constexpr std::array<Table1Row, 3> kTable1{{
    {{0.2, 0.2, 0.2, 0.2, 0.2}, {-50.0, -30.0, 0.0, 30.0, 50.0}},
    {{0.1, 0.1, 0.6, 0.1, 0.1}, {-50.0, -30.0, 0.0, 30.0, 50.0}},
    {{0.5, 0.1, 0.1, 0.1, 0.2}, {-50.0, 10.0, 30.0, 50.0, 80.0}},
}};

}  // namespace

NoisePair build_table1(int model_id, double c) {
    if (model_id < 1 || model_id > 3) {
        throw InvalidArgument("synthetic model id must be 1, 2 or 3 (got " +
                              std::to_string(model_id) + ")");
    }
    if (!(c >= 0.0) || !std::isfinite(c)) {
        throw InvalidArgument("separation c must be finite and nonnegative");
    }
    const Table1Row& row = kTable1[static_cast<std::size_t>(model_id - 1)];
    std::vector<double> weights(row.weights.begin(), row.weights.end());
    std::vector<double> means;
    for (double m : row.means) {
        means.push_back(c * m);
    }
    const std::vector<double> variances(5, 1.0);
    GaussianMixture gm = GaussianMixture::scalar(weights, means, variances);
    return {gm, gm};
}

SystemModel build_synthetic_model(const SyntheticModelSpec& spec, const TimeGrid& grid) {
    const NoisePair noise = build_table1(spec.model_id, spec.c);
    return rw_velocity_model(noise.process, noise.measurement, grid);
}

NoisePair table2_x_noise() {
    return {GaussianMixture::scalar({0.13, 0.77, 0.099}, {-41.44, 0.51, 49.79},
                                    {148.24, 48.38, 83.75}),
            GaussianMixture::scalar({0.07, 0.85, 0.08}, {-300.01, -17.06, 207.37},
                                    {8163.20, 3611.99, 5677.21})};
}

NoisePair table2_y_noise() {
    return {GaussianMixture::scalar(
                {0.01, 0.06, 0.03, 0.03, 0.72, 0.04, 0.02, 0.06, 0.03},
                {-63.38, -48.73, -35.65, -17.40, -0.32, 9.52, 30.09, 44.24, 54.35},
                {24.34, 21.53, 18.18, 23.62, 3.13, 12.16, 18.81, 12.96, 15.44}),
            GaussianMixture::scalar({0.98, 0.02}, {-125.93, 147.25}, {8500.19, 10809.10})};
}

Table2Scenario build_table2_scenario(const TimeGrid& grid) {
    const NoisePair x = table2_x_noise();
    const NoisePair y = table2_y_noise();
    return {rw_velocity_model(x.process, x.measurement, grid),
            rw_velocity_model(y.process, y.measurement, grid)};
}

std::optional<NoisePair> scenario_noise(std::string_view id) {
    if (id == "table2-x") {
        return table2_x_noise();
    }
    if (id == "table2-y") {
        return table2_y_noise();
    }
    return std::nullopt;
}

}  // namespace gsf
