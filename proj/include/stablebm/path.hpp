#pragma once
// Sampled-path records: states at step times, big-jump events, the boundary
// absorption time, and the first-exit annotation of a monitored box.

#include <cmath>
#include <optional>
#include <vector>

#include "params.hpp"

namespace sbm {

struct JumpEvent {
    double time = 0.0;
    std::vector<double> pre_position;
    std::vector<double> post_position;
    double magnitude = 0.0; // |post - pre|, > 0 for recorded events
};

// Face encoding: 0..d-1 = horizontal axis index, d = vertical bottom,
// d+1 = vertical top, -1 = no exit observed (horizon reached).
struct ExitEvent {
    double time = 0.0;
    SpaceTimePoint location;
    int face = -1;
};

struct PathState {
    double time = 0.0;
    std::vector<double> x;
    double t = 0.0;
};

struct PathRecord {
    double dt = 0.0;
    std::vector<PathState> states; // start and final always present; full
                                   // sequence only when recording was enabled
    std::vector<JumpEvent> jumps;  // |dY| >= jump_threshold only
    std::optional<double> T0;      // absorption time, absent if not absorbed
    std::optional<ExitEvent> exit; // set by box-monitoring runners
    double jump_threshold = HUGE_VAL;

    const PathState& final_state() const { return states.back(); }
};

} // namespace sbm
