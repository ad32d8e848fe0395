// Synthetic mask sequence generator: renders trapezoidal lane-region masks
// following scripted maneuvers (lane keep, left/right change, incursion) with
// controllable noise, and emits the matching ground-truth event log and
// lateral trajectory. Serves as the ground-truth oracle for pipeline tests.

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "lanetrack/classifier.hpp"
#include "lanetrack/mask_io.hpp"

namespace lanetrack {

struct Maneuver {
    EventKind kind = EventKind::change;
    Direction direction = Direction::left;
    int start_frame = 0;
    int duration_frames = 80;
    double lateral_amplitude = 120.0;  // px
};

struct NoiseConfig {
    double jitter_sigma = 0.0;   // px, Gaussian on trapezoid corner coordinates
    double dropout_prob = 0.0;   // per frame, renders an empty mask
    double speckle_prob = 0.0;   // per background pixel, flips to lane
};

struct Scenario {
    int width = 752;
    int height = 480;
    double fps = 25.0;
    int duration_frames = 300;
    std::vector<Maneuver> maneuvers;  // non-overlapping in time
    NoiseConfig noise;
};

struct SyntheticClip {
    std::vector<Mask> masks;
    std::vector<LaneEvent> truth_events;     // one per maneuver, anchored at start_frame
    std::vector<double> lateral_trajectory;  // programmed centroid offset per frame, px
};

// Programmed lateral offset of the trapezoid center from the image center
// line at the given frame (before noise). Lane keep = 0; change = smooth ramp
// to +amp (left) then a re-anchor to -amp decaying back to 0; incursion =
// smooth half-ramp out and back with no re-anchor.
double maneuver_offset(const Scenario& scenario, int frame);

// Deterministic for a fixed (scenario, seed). Throws InvalidScenario.
SyntheticClip render_clip(const Scenario& scenario, std::uint64_t seed);

// Renders the clip and writes manifest + PGM frames + truth event log
// (truth_events.jsonl) + lateral trajectory CSV (trajectory.csv) under
// out_dir. Returns the manifest path.
std::filesystem::path generate(const Scenario& scenario, std::uint64_t seed,
                               const std::filesystem::path& out_dir);

// Flat key=value scenario description ('#' comments; repeated "maneuver="
// lines hold "kind,direction,start_frame,duration_frames,amplitude").
Scenario load_scenario(const std::filesystem::path& path);

void validate(const Scenario& scenario);  // throws InvalidScenario

}  // namespace lanetrack
