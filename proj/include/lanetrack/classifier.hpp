// Peak detection over the smoothed offset series and classification of lane
// changes and incursions.
//
// Sign convention: positive vertical offset means the lane-region centroid
// lies right of the image center line. A leftward drift raises the offset
// (peak), and after the crossing the newly occupied lane's centroid appears
// left of center (trough) - hence peak-then-trough = left change and
// trough-then-peak = right change. PeakConfig::invert_direction flips the
// convention for cameras/datasets wired the other way.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lanetrack/tracking.hpp"

namespace lanetrack {

struct PeakConfig {
    double min_prominence = 10.0;  // px
    int min_peak_distance = 12;    // frames, enforced per extremum kind
    int max_pair_distance = 75;    // frames between a peak and its depression zone
    bool invert_direction = false;
    // Incursions must stay below shallowness_factor * median change amplitude
    // when the clip produced >= 2 change events; <= 0 disables the gate.
    double shallowness_factor = 0.6;
};

enum class ExtremumKind { peak, trough };

struct Extremum {
    int frame_index = 0;
    double amplitude = 0.0;  // signed px; > 0 for peaks, < 0 for troughs
    ExtremumKind kind = ExtremumKind::peak;
};

enum class EventKind { change, incursion };
enum class Direction { left, right, none };

struct LaneEvent {
    EventKind kind = EventKind::change;
    Direction direction = Direction::none;
    int frame_index = 0;  // anchor = first extremum of the event
    std::optional<int> peak_frame;
    std::optional<int> trough_frame;
    std::optional<double> peak_amplitude;
    std::optional<double> trough_amplitude;
};

std::string to_string(EventKind kind);
std::string to_string(Direction dir);
EventKind event_kind_from_string(const std::string& s);
Direction direction_from_string(const std::string& s);

// Pointwise negation. Requires a smoothed-stage series.
OffsetSeries mirror_series(const OffsetSeries& series);

// Local maxima of the series (peaks, amplitude > 0) and of its mirror
// (troughs, amplitude < 0) with both prominence and amplitude >=
// min_prominence (the series is centered at zero), separated by >=
// min_peak_distance within each kind. Result sorted by frame_index.
std::vector<Extremum> detect_peaks(const OffsetSeries& series, const PeakConfig& cfg);

// Greedy left-to-right pairing: an extremum followed within max_pair_distance
// frames by an unconsumed opposite-kind extremum forms a change event
// anchored at the first of the two; leftover extrema become incursions,
// subject to the shallowness gate.
std::vector<LaneEvent> classify_events(const std::vector<Extremum>& extrema,
                                       const PeakConfig& cfg);

// Event log: one JSON object per line with kind, direction, frame_index,
// timestamp_ms, peak_frames, amplitudes. Unset extremum fields are null.
void write_events_jsonl(const std::filesystem::path& path,
                        const std::vector<LaneEvent>& events, double fps);
std::vector<LaneEvent> read_events_jsonl(const std::filesystem::path& path);

}  // namespace lanetrack
