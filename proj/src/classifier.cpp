#include "lanetrack/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace lanetrack {

std::string to_string(EventKind kind) {
    return kind == EventKind::change ? "change" : "incursion";
}

std::string to_string(Direction dir) {
    switch (dir) {
        case Direction::left: return "left";
        case Direction::right: return "right";
        default: return "none";
    }
}

EventKind event_kind_from_string(const std::string& s) {
    if (s == "change") return EventKind::change;
    if (s == "incursion") return EventKind::incursion;
    throw FormatError("unknown event kind '" + s + "'");
}

Direction direction_from_string(const std::string& s) {
    if (s == "left") return Direction::left;
    if (s == "right") return Direction::right;
    if (s == "none") return Direction::none;
    throw FormatError("unknown direction '" + s + "'");
}

OffsetSeries mirror_series(const OffsetSeries& series) {
    if (series.stage != SeriesStage::smoothed)
        throw std::invalid_argument("mirror_series: expected a smoothed-stage series");
    OffsetSeries out = series;
    for (auto& s : out.samples) s.vertical_offset = -s.vertical_offset;
    return out;
}

namespace {

// Local maxima with plateau handling (a flat top yields its middle sample)
// and prominence: the drop from the peak to the higher of the two minima
// separating it from the nearest greater values (or the series ends).
struct RawPeak {
    std::size_t index;
    double value;
    double prominence;
};

std::vector<RawPeak> local_maxima(const std::vector<double>& x) {
    std::vector<RawPeak> peaks;
    const std::size_t n = x.size();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(x[i] > x[i - 1])) continue;
        std::size_t j = i;
        while (j + 1 < n && x[j + 1] == x[i]) ++j;
        if (j + 1 < n && x[j + 1] < x[i]) {
            std::size_t mid = (i + j) / 2;

            double left_min = x[i];
            for (std::size_t k = i; k-- > 0;) {
                left_min = std::min(left_min, x[k]);
                if (x[k] > x[i]) break;
            }
            double right_min = x[j];
            for (std::size_t k = j + 1; k < n; ++k) {
                right_min = std::min(right_min, x[k]);
                if (x[k] > x[i]) break;
            }
            peaks.push_back({mid, x[i], x[i] - std::max(left_min, right_min)});
        }
        i = j;
    }
    return peaks;
}

// Greedy distance suppression: strongest peaks win, ties to the earlier one.
std::vector<RawPeak> enforce_distance(std::vector<RawPeak> peaks,
                                      const std::vector<int>& frames, int min_distance) {
    std::stable_sort(peaks.begin(), peaks.end(), [](const RawPeak& a, const RawPeak& b) {
        return a.value != b.value ? a.value > b.value : a.index < b.index;
    });
    std::vector<RawPeak> kept;
    for (const auto& p : peaks) {
        bool blocked = false;
        for (const auto& q : kept) {
            if (std::abs(frames[p.index] - frames[q.index]) < min_distance) {
                blocked = true;
                break;
            }
        }
        if (!blocked) kept.push_back(p);
    }
    std::sort(kept.begin(), kept.end(),
              [](const RawPeak& a, const RawPeak& b) { return a.index < b.index; });
    return kept;
}

}  // namespace

namespace {

void check_peak_config(const PeakConfig& cfg) {
    if (cfg.min_prominence <= 0.0 || cfg.min_peak_distance <= 0 ||
        cfg.max_pair_distance <= 0)
        throw std::invalid_argument("peak config: thresholds must be positive");
}

}  // namespace

std::vector<Extremum> detect_peaks(const OffsetSeries& series, const PeakConfig& cfg) {
    if (series.stage != SeriesStage::smoothed)
        throw std::invalid_argument("detect_peaks: expected a smoothed-stage series");
    check_peak_config(cfg);

    std::vector<double> values;
    std::vector<int> frames;
    values.reserve(series.size());
    for (const auto& s : series.samples) {
        values.push_back(s.vertical_offset);
        frames.push_back(s.frame_index);
    }

    std::vector<Extremum> extrema;
    auto collect = [&](const std::vector<double>& x, ExtremumKind kind) {
        auto peaks = local_maxima(x);
        std::erase_if(peaks, [&](const RawPeak& p) {
            // The series is centered at zero, so a departure extremum must
            // clear the threshold in amplitude as well as prominence. Deep
            // flanking valleys otherwise lend near-baseline wiggles a large
            // prominence and they pair into phantom changes.
            return p.prominence < cfg.min_prominence || p.value < cfg.min_prominence;
        });
        peaks = enforce_distance(std::move(peaks), frames, cfg.min_peak_distance);
        for (const auto& p : peaks) {
            double amplitude = kind == ExtremumKind::peak ? p.value : -p.value;
            extrema.push_back({frames[p.index], amplitude, kind});
        }
    };

    collect(values, ExtremumKind::peak);
    std::vector<double> mirrored(values.size());
    std::transform(values.begin(), values.end(), mirrored.begin(),
                   [](double v) { return -v; });
    collect(mirrored, ExtremumKind::trough);

    std::sort(extrema.begin(), extrema.end(), [](const Extremum& a, const Extremum& b) {
        return a.frame_index != b.frame_index ? a.frame_index < b.frame_index
                                              : a.kind < b.kind;
    });
    return extrema;
}

namespace {

Direction maybe_invert(Direction dir, bool invert) {
    if (!invert || dir == Direction::none) return dir;
    return dir == Direction::left ? Direction::right : Direction::left;
}

LaneEvent make_change(const Extremum& first, const Extremum& second, bool invert) {
    const Extremum& peak = first.kind == ExtremumKind::peak ? first : second;
    const Extremum& trough = first.kind == ExtremumKind::peak ? second : first;
    LaneEvent ev;
    ev.kind = EventKind::change;
    ev.direction = maybe_invert(
        first.kind == ExtremumKind::peak ? Direction::left : Direction::right, invert);
    ev.frame_index = first.frame_index;
    ev.peak_frame = peak.frame_index;
    ev.trough_frame = trough.frame_index;
    ev.peak_amplitude = peak.amplitude;
    ev.trough_amplitude = trough.amplitude;
    return ev;
}

LaneEvent make_incursion(const Extremum& e, bool invert) {
    LaneEvent ev;
    ev.kind = EventKind::incursion;
    ev.direction = maybe_invert(
        e.kind == ExtremumKind::peak ? Direction::left : Direction::right, invert);
    ev.frame_index = e.frame_index;
    if (e.kind == ExtremumKind::peak) {
        ev.peak_frame = e.frame_index;
        ev.peak_amplitude = e.amplitude;
    } else {
        ev.trough_frame = e.frame_index;
        ev.trough_amplitude = e.amplitude;
    }
    return ev;
}

double change_amplitude(const LaneEvent& ev) {
    return std::max(std::abs(ev.peak_amplitude.value_or(0.0)),
                    std::abs(ev.trough_amplitude.value_or(0.0)));
}

}  // namespace

std::vector<LaneEvent> classify_events(const std::vector<Extremum>& extrema,
                                       const PeakConfig& cfg) {
    check_peak_config(cfg);
    std::vector<LaneEvent> changes;
    std::vector<const Extremum*> lone;
    std::vector<bool> consumed(extrema.size(), false);

    for (std::size_t i = 0; i < extrema.size(); ++i) {
        if (consumed[i]) continue;
        std::size_t partner = extrema.size();
        for (std::size_t j = i + 1; j < extrema.size(); ++j) {
            if (consumed[j] || extrema[j].kind == extrema[i].kind) continue;
            int gap = extrema[j].frame_index - extrema[i].frame_index;
            if (gap > cfg.max_pair_distance) break;
            if (gap > 0) {
                partner = j;
                break;
            }
        }
        consumed[i] = true;
        if (partner != extrema.size()) {
            consumed[partner] = true;
            changes.push_back(make_change(extrema[i], extrema[partner],
                                          cfg.invert_direction));
        } else {
            lone.push_back(&extrema[i]);
        }
    }

    // Shallowness gate: with enough change events to calibrate against, an
    // unpaired extremum as tall as a departure peak is noise, not an
    // incursion.
    double ceiling = std::numeric_limits<double>::infinity();
    if (cfg.shallowness_factor > 0.0 && changes.size() >= 2) {
        std::vector<double> amps;
        amps.reserve(changes.size());
        for (const auto& ev : changes) amps.push_back(change_amplitude(ev));
        std::sort(amps.begin(), amps.end());
        double median = amps.size() % 2 == 1
                            ? amps[amps.size() / 2]
                            : 0.5 * (amps[amps.size() / 2 - 1] + amps[amps.size() / 2]);
        ceiling = cfg.shallowness_factor * median;
    }

    std::vector<LaneEvent> events = std::move(changes);
    for (const Extremum* e : lone)
        if (std::abs(e->amplitude) < ceiling)
            events.push_back(make_incursion(*e, cfg.invert_direction));

    std::sort(events.begin(), events.end(), [](const LaneEvent& a, const LaneEvent& b) {
        return a.frame_index < b.frame_index;
    });
    return events;
}

namespace {

nlohmann::json opt_json(const std::optional<int>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json opt_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

void write_events_jsonl(const std::filesystem::path& path,
                        const std::vector<LaneEvent>& events, double fps) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write event log: " + path.string());
    for (const auto& ev : events) {
        nlohmann::json record = {
            {"kind", to_string(ev.kind)},
            {"direction", to_string(ev.direction)},
            {"frame_index", ev.frame_index},
            {"timestamp_ms", frame_timestamp_ms(ev.frame_index, fps)},
            {"peak_frames",
             {{"peak", opt_json(ev.peak_frame)}, {"trough", opt_json(ev.trough_frame)}}},
            {"amplitudes",
             {{"peak", opt_json(ev.peak_amplitude)},
              {"trough", opt_json(ev.trough_amplitude)}}},
        };
        out << record.dump() << "\n";
    }
    if (!out) throw IoError("write failed: " + path.string());
}

std::vector<LaneEvent> read_events_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open event log: " + path.string());

    std::vector<LaneEvent> events;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("event log " + path.string() + " line " +
                              std::to_string(line_no) + ": " + e.what());
        }
        if (!record.contains("kind") || !record.contains("direction") ||
            !record.contains("frame_index"))
            throw FormatError("event log " + path.string() + " line " +
                              std::to_string(line_no) + ": missing required field");
        LaneEvent ev;
        ev.kind = event_kind_from_string(record["kind"].get<std::string>());
        ev.direction = direction_from_string(record["direction"].get<std::string>());
        ev.frame_index = record["frame_index"].get<int>();
        if (auto it = record.find("peak_frames"); it != record.end()) {
            if (it->contains("peak") && !(*it)["peak"].is_null())
                ev.peak_frame = (*it)["peak"].get<int>();
            if (it->contains("trough") && !(*it)["trough"].is_null())
                ev.trough_frame = (*it)["trough"].get<int>();
        }
        if (auto it = record.find("amplitudes"); it != record.end()) {
            if (it->contains("peak") && !(*it)["peak"].is_null())
                ev.peak_amplitude = (*it)["peak"].get<double>();
            if (it->contains("trough") && !(*it)["trough"].is_null())
                ev.trough_amplitude = (*it)["trough"].get<double>();
        }
        events.push_back(ev);
    }
    return events;
}

}  // namespace lanetrack
