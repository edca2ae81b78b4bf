#pragma once

#include "gsf/state_space.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace gsf {

/// Canonical header of the trajectory CSV. `x_pos,x_vel` (ground truth) and
/// `active_v,active_w` (cluster labels) are optional column pairs; when
/// present they keep this order.
inline constexpr const char* kTrajectoryHeader = "step,dt,z,x_pos,x_vel,active_v,active_w";

/// Writes a one-axis trajectory (2-state, scalar measurement). Columns for
/// missing truth or labels are omitted. `comments` are emitted first, each
/// prefixed with "# ". Numbers use the shortest round-trip representation,
/// so writing and reading back is lossless.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory,
                          const std::vector<std::string>& comments = {});

/// Parses the trajectory CSV. Lines starting with '#' are ignored.
/// Throws SchemaError (with the physical line number) on any violation,
/// including a dt that is not a positive multiple of 0.1080 s.
[[nodiscard]] Trajectory read_trajectory_csv(std::istream& in);

[[nodiscard]] Trajectory ingest_trajectory(const std::filesystem::path& path);

}  // namespace gsf
