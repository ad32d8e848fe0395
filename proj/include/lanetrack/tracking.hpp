// Converts per-frame hull centroids into a mean-centered, fixed-lag-Kalman
// smoothed offset series.
//
// The vertical offset is the signed horizontal displacement of the lane-mask
// centroid from the image's vertical center line; the horizontal offset is
// the distance from the centroid to the bottom edge (vehicle reference).

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "lanetrack/errors.hpp"
#include "lanetrack/mask_io.hpp"

namespace lanetrack {

struct OffsetSample {
    int frame_index = 0;
    double vertical_offset = 0.0;    // signed px, + means centroid right of center
    double horizontal_offset = 0.0;  // px from centroid to bottom-edge reference line
    bool valid = false;              // false when the frame had no usable detection
};

enum class SeriesStage { raw, centered, smoothed };

// Samples ordered by strictly increasing frame_index. Stage transitions only
// raw -> centered -> smoothed.
struct OffsetSeries {
    std::vector<OffsetSample> samples;
    SeriesStage stage = SeriesStage::raw;

    std::size_t size() const { return samples.size(); }
};

// Fixed-lag smoother settings over a constant-velocity state [offset, rate].
struct KalmanConfig {
    int lag = 15;                    // frames of lookahead before an estimate is final
    double process_noise = 0.5;      // px^2 / frame^2 (white-acceleration spectral density)
    double measurement_noise = 9.0;  // px^2
};

// Per frame: ROI-filter -> points -> quickhull -> centroid -> offsets against
// center_x = width/2 and the bottom-edge line y = height. Frames with no or
// degenerate detections yield valid = false samples. Throws EmptySequence.
OffsetSeries compute_offsets(const std::vector<Mask>& masks, const RoiMask* roi,
                             int max_points = 4096);

// Subtracts the mean vertical offset of valid samples; invalid samples are
// untouched. window_radius > 0 switches to a sliding mean over valid samples
// within +-window_radius frames (for long recordings with mount drift).
// Throws NoValidSamples.
OffsetSeries center_series(const OffsetSeries& series, int window_radius = 0);

// Fixed-lag Kalman smoother: the estimate at frame t is finalized using
// measurements up to t + lag. Invalid samples are treated as missing
// measurements (prediction only) and receive interpolated estimates; output
// length and frame indices match the input.
OffsetSeries kalman_smooth(const OffsetSeries& series, const KalmanConfig& cfg);

// Maximal sample-index ranges [first, last] spanning valid samples such that
// no interior run of consecutive invalid samples exceeds max_gap. Longer
// dropouts split the series; smoothing and classification restart per
// segment.
std::vector<std::pair<std::size_t, std::size_t>> split_on_gaps(const OffsetSeries& series,
                                                               int max_gap);

// Smooths each gap-delimited segment independently and reassembles a full
// length series; samples outside every segment pass through unchanged.
// Returns the smoothed series plus the segment ranges used.
struct SmoothedSegments {
    OffsetSeries series;
    std::vector<std::pair<std::size_t, std::size_t>> segments;
};
SmoothedSegments smooth_with_gaps(const OffsetSeries& series, const KalmanConfig& cfg,
                                  int max_gap);

}  // namespace lanetrack
