#include "gsf/csv.hpp"
#include "gsf/error.hpp"
#include "gsf/scenarios.hpp"
#include "gsf/trajectory_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace gsf {
namespace {

Trajectory parse(const std::string& text) {
    std::istringstream in(text);
    return read_trajectory_csv(in);
}

TEST(Csv, FormatRoundTrips) {
    for (double x : {0.1, -1e-300, 123456.789, 1.0 / 3.0, 0.108}) {
        EXPECT_EQ(csv::parse_double(csv::format_double(x)), x);
    }
    EXPECT_EQ(csv::format_double(0.108), "0.108");
    EXPECT_FALSE(csv::parse_double("1,5").has_value());
    EXPECT_FALSE(csv::parse_double("").has_value());
    EXPECT_EQ(csv::parse_integer("12"), 12);
    EXPECT_FALSE(csv::parse_integer("1.5").has_value());
}

TEST(TrajectoryCsv, MeasurementsOnly) {
    const Trajectory t = parse(
        "step,dt,z\n"
        "1,0.1080,1.5\n"
        "2,0.1080,-2\n"
        "3,0.1080,0.25\n");
    EXPECT_EQ(t.size(), 3u);
    EXPECT_FALSE(t.has_truth());
    EXPECT_FALSE(t.has_labels());
    EXPECT_EQ(t.measurements[1][0], -2.0);
    EXPECT_TRUE(t.grid.is_constant());
}

TEST(TrajectoryCsv, FullSchemaWithCommentsAndCrlf) {
    const Trajectory t = parse(
        "# recorded run\n"
        "step,dt,z,x_pos,x_vel,active_v,active_w\r\n"
        "1,0.108,1.5,1.4,0.2,0,1\r\n"
        "\n"
        "2,0.216,1.9,1.45,0.25,2,0\n");
    EXPECT_EQ(t.size(), 2u);
    EXPECT_EQ(t.grid.ticks(1), 2u);
    EXPECT_EQ(t.states[1][1], 0.25);
    EXPECT_EQ(t.active_v[1], 2u);
}

TEST(TrajectoryCsv, RejectsOffTickDt) {
    try {
        (void)parse("step,dt,z\n1,0.108,1\n2,0.15,2\n");
        FAIL() << "expected SchemaError";
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_NE(std::string(e.what()).find("dt not a multiple of 0.1080"), std::string::npos);
    }
}

TEST(TrajectoryCsv, SchemaViolationsCarryLineNumbers) {
    const auto line_of = [](const std::string& text) -> std::size_t {
        try {
            (void)parse(text);
        } catch (const SchemaError& e) {
            return e.line();
        }
        return 0;
    };
    EXPECT_EQ(line_of("step,z,dt\n1,1,0.108\n"), 1u);
    EXPECT_EQ(line_of("step,dt,z\n1,0.108\n"), 2u);
    EXPECT_EQ(line_of("step,dt,z\n1,0.108,abc\n"), 2u);
    EXPECT_EQ(line_of("step,dt,z\n1,0.108,1\n3,0.108,1\n"), 3u);
    EXPECT_EQ(line_of("step,dt,z,x_pos,x_vel\n1,0.108,1,1\n"), 2u);
    EXPECT_EQ(line_of("step,dt,z,active_v\n1,0.108,1,0\n"), 1u);
    EXPECT_EQ(line_of("step,dt,z,x_pos,x_vel,active_v,active_w\n1,0.108,1,1,1,-1,0\n"), 2u);
    EXPECT_EQ(line_of("step,dt,z\n"), 1u);
}

TEST(TrajectoryCsv, SimulatedRoundTripIsBitIdentical) {
    const NoisePair n = table2_y_noise();
    const TimeGrid grid({0.108, 0.216, 0.108, 0.432, 0.108});
    const SystemModel m = rw_velocity_model(n.process, n.measurement, grid);
    Rng rng(31);
    const Trajectory t = simulate(m, Eigen::Vector2d(0.5, -0.25), grid, rng);

    const auto path = std::filesystem::temp_directory_path() / "gsf_roundtrip_test.csv";
    {
        std::ofstream out(path);
        write_trajectory_csv(out, t, {"seed 31"});
    }
    const Trajectory back = ingest_trajectory(path);
    std::filesystem::remove(path);
    EXPECT_TRUE(back == t);
    for (std::size_t k = 0; k < t.size(); ++k) {
        EXPECT_EQ(back.measurements[k][0], t.measurements[k][0]);
        EXPECT_EQ(back.states[k], t.states[k]);
    }
    EXPECT_EQ(back.grid.dts(), t.grid.dts());
}

TEST(TrajectoryCsv, WriterOmitsMissingColumns) {
    Trajectory t;
    t.measurements = {VectorXd::Constant(1, 1.0)};
    t.grid = TimeGrid::uniform(1);
    std::ostringstream out;
    write_trajectory_csv(out, t);
    EXPECT_EQ(out.str(), "step,dt,z\n1,0.108,1\n");
}

TEST(TrajectoryCsv, MissingFileIsAnError) {
    EXPECT_THROW((void)ingest_trajectory("/nonexistent/gsf.csv"), Error);
}

}  // namespace
}  // namespace gsf
