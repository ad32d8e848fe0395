// Pipeline orchestration: load frames -> track -> classify -> report, plus
// the evaluation harness. The CLI subcommands are thin wrappers over these
// entry points so tests can drive the identical code paths.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lanetrack/classifier.hpp"
#include "lanetrack/evaluation.hpp"
#include "lanetrack/mask_io.hpp"
#include "lanetrack/scenario.hpp"
#include "lanetrack/tracking.hpp"

namespace lanetrack {

struct PipelineConfig {
    KalmanConfig kalman;
    PeakConfig peaks;
    int max_points = 4096;
    int center_window = 0;   // 0 = global mean centering
    int max_gap_frames = 0;  // 0 = auto (round(fps)); longer dropouts split segments
};

struct TrackingResult {
    OffsetSeries raw;
    OffsetSeries centered;
    OffsetSeries smoothed;
    std::vector<std::pair<std::size_t, std::size_t>> segments;
    std::vector<LaneEvent> events;
};

// In-memory pipeline over an already-loaded mask sequence. fps only feeds the
// auto gap threshold. Throws EmptySequence for an empty input.
TrackingResult process_sequence(const std::vector<Mask>& masks, const RoiMask* roi,
                                const PipelineConfig& cfg, double fps);

struct RunConfig {
    std::filesystem::path manifest_path;
    std::optional<std::filesystem::path> roi_path;
    std::filesystem::path output_dir;
    PipelineConfig pipeline;
};

// Full offline run: loads the manifest and frames, tracks, classifies, and
// writes offsets.csv, horizontal.csv, events.jsonl, and summary.json under
// output_dir. Returns the in-memory result.
TrackingResult run_pipeline(const RunConfig& cfg);

struct EvalInputs {
    std::optional<std::filesystem::path> predicted_events;  // JSONL
    std::optional<std::filesystem::path> truth_events;      // JSONL
    std::optional<std::filesystem::path> predicted_manifest;
    std::optional<std::filesystem::path> truth_manifest;
    std::optional<std::filesystem::path> counts_file;  // direct confusion counts JSON
    EvalConfig config;
};

// Computes the requested metric sections and writes the JSON report.
// Returns the serialized report text (exactly what was written).
std::string run_eval(const EvalInputs& inputs, const std::filesystem::path& report_path);

// Artifact helpers (shared by run_pipeline, run_eval, and the tests).
void write_offsets_csv(const std::filesystem::path& path, const TrackingResult& result);
void write_horizontal_csv(const std::filesystem::path& path, const OffsetSeries& raw);

}  // namespace lanetrack
