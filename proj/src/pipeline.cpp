#include "lanetrack/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"

namespace lanetrack {

namespace {

using nlohmann::json;

int effective_max_gap(const PipelineConfig& cfg, double fps) {
    return cfg.max_gap_frames > 0 ? cfg.max_gap_frames
                                  : static_cast<int>(std::lround(fps));
}

OffsetSeries slice(const OffsetSeries& series, std::size_t first, std::size_t last) {
    OffsetSeries out;
    out.stage = series.stage;
    out.samples.assign(series.samples.begin() + static_cast<std::ptrdiff_t>(first),
                       series.samples.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

TrackingResult process_sequence(const std::vector<Mask>& masks, const RoiMask* roi,
                                const PipelineConfig& cfg, double fps) {
    TrackingResult result;
    result.raw = compute_offsets(masks, roi, cfg.max_points);

    try {
        result.centered = center_series(result.raw, cfg.center_window);
    } catch (const NoValidSamples&) {
        // A clip with zero detections is a valid no-events outcome.
        result.centered = result.raw;
        result.centered.stage = SeriesStage::centered;
        result.smoothed = result.centered;
        result.smoothed.stage = SeriesStage::smoothed;
        return result;
    }

    auto smoothed = smooth_with_gaps(result.centered, cfg.kalman,
                                     effective_max_gap(cfg, fps));
    result.smoothed = std::move(smoothed.series);
    result.segments = std::move(smoothed.segments);

    // Detection dropouts longer than the gap threshold reset the classifier:
    // each segment is classified on its own.
    for (const auto& [first, last] : result.segments) {
        auto segment = slice(result.smoothed, first, last);
        auto events = classify_events(detect_peaks(segment, cfg.peaks), cfg.peaks);
        result.events.insert(result.events.end(), events.begin(), events.end());
    }
    std::sort(result.events.begin(), result.events.end(),
              [](const LaneEvent& a, const LaneEvent& b) {
                  return a.frame_index < b.frame_index;
              });
    return result;
}

void write_offsets_csv(const std::filesystem::path& path, const TrackingResult& result) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write offsets: " + path.string());
    out << "frame_index,raw,centered,smoothed,valid\n";
    for (std::size_t i = 0; i < result.raw.size(); ++i) {
        const auto& raw = result.raw.samples[i];
        out << raw.frame_index << "," << format_double(raw.vertical_offset) << ","
            << format_double(result.centered.samples[i].vertical_offset) << ","
            << format_double(result.smoothed.samples[i].vertical_offset) << ","
            << (raw.valid ? 1 : 0) << "\n";
    }
    if (!out) throw IoError("write failed: " + path.string());
}

void write_horizontal_csv(const std::filesystem::path& path, const OffsetSeries& raw) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write horizontal offsets: " + path.string());
    out << "frame_index,horizontal,valid\n";
    for (const auto& s : raw.samples)
        out << s.frame_index << "," << format_double(s.horizontal_offset) << ","
            << (s.valid ? 1 : 0) << "\n";
    if (!out) throw IoError("write failed: " + path.string());
}

namespace {

json config_json(const PipelineConfig& cfg) {
    return {
        {"kalman",
         {{"lag", cfg.kalman.lag},
          {"process_noise", cfg.kalman.process_noise},
          {"measurement_noise", cfg.kalman.measurement_noise}}},
        {"peaks",
         {{"min_prominence", cfg.peaks.min_prominence},
          {"min_peak_distance", cfg.peaks.min_peak_distance},
          {"max_pair_distance", cfg.peaks.max_pair_distance},
          {"invert_direction", cfg.peaks.invert_direction},
          {"shallowness_factor", cfg.peaks.shallowness_factor}}},
        {"max_points", cfg.max_points},
        {"center_window", cfg.center_window},
        {"max_gap_frames", cfg.max_gap_frames},
    };
}

void write_summary(const std::filesystem::path& path, const TrackingResult& result,
                   const PipelineConfig& cfg, double fps) {
    std::size_t valid = 0;
    for (const auto& s : result.raw.samples) valid += s.valid ? 1 : 0;

    json events = {
        {"change", {{"left", 0}, {"right", 0}}},
        {"incursion", {{"left", 0}, {"right", 0}}},
    };
    for (const auto& ev : result.events) {
        auto& slot = events[to_string(ev.kind)][to_string(ev.direction)];
        slot = slot.get<int>() + 1;
    }

    json summary = {
        {"frames", result.raw.size()},
        {"valid_frames", valid},
        {"segments", result.segments.size()},
        {"fps", fps},
        {"events", events},
        {"config", config_json(cfg)},
    };
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write summary: " + path.string());
    out << summary.dump(2) << "\n";
}

}  // namespace

TrackingResult run_pipeline(const RunConfig& cfg) {
    auto manifest = load_manifest(cfg.manifest_path);
    if (manifest.entries.empty())
        throw EmptySequence("no frames listed in " + cfg.manifest_path.string());

    const auto base_dir = cfg.manifest_path.parent_path();
    std::vector<Mask> masks;
    masks.reserve(manifest.entries.size());
    for (const auto& entry : manifest.entries) {
        Mask mask = load_mask(base_dir / entry.path);
        if (mask.width != manifest.width || mask.height != manifest.height)
            throw DimensionMismatch("frame " + entry.path +
                                    " does not match the manifest dimensions");
        mask.frame_index = entry.frame_index;
        masks.push_back(std::move(mask));
    }

    std::optional<Mask> roi;
    if (cfg.roi_path) {
        roi = load_mask(*cfg.roi_path);
        if (roi->width != manifest.width || roi->height != manifest.height)
            throw DimensionMismatch("ROI does not match the manifest dimensions");
    }

    auto result = process_sequence(masks, roi ? &*roi : nullptr, cfg.pipeline, manifest.fps);

    std::filesystem::create_directories(cfg.output_dir);
    write_offsets_csv(cfg.output_dir / "offsets.csv", result);
    write_horizontal_csv(cfg.output_dir / "horizontal.csv", result.raw);
    write_events_jsonl(cfg.output_dir / "events.jsonl", result.events, manifest.fps);
    write_summary(cfg.output_dir / "summary.json", result, cfg.pipeline, manifest.fps);
    return result;
}

namespace {

std::vector<Mask> load_sequence(const std::filesystem::path& manifest_path) {
    auto manifest = load_manifest(manifest_path);
    const auto base_dir = manifest_path.parent_path();
    std::vector<Mask> masks;
    masks.reserve(manifest.entries.size());
    for (const auto& entry : manifest.entries) {
        Mask mask = load_mask(base_dir / entry.path);
        mask.frame_index = entry.frame_index;
        masks.push_back(std::move(mask));
    }
    return masks;
}

json counts_json(const ConfusionCounts& c) {
    return {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}};
}

ConfusionCounts counts_from_json(const json& j) {
    ConfusionCounts c;
    c.tp = j.value("tp", 0LL);
    c.fp = j.value("fp", 0LL);
    c.fn = j.value("fn", 0LL);
    c.tn = j.value("tn", 0LL);
    return c;
}

json direction_row(const ConfusionCounts& c) {
    json row = counts_json(c);
    row["crossings"] = c.tp + c.fn;
    return row;
}

// Confusion table keyed Table-1 style: one row per direction (kinds summed)
// plus the per-kind breakdown and the combined sensitivity.
json event_section(const std::map<EventKey, ConfusionCounts>& per_key) {
    ConfusionCounts left, right, combined;
    json by_key = json::array();
    for (const auto& [key, counts] : per_key) {
        json row = counts_json(counts);
        row["kind"] = to_string(key.kind);
        row["direction"] = to_string(key.direction);
        by_key.push_back(row);
        if (key.direction == Direction::left) left += counts;
        if (key.direction == Direction::right) right += counts;
        combined += counts;
    }
    json section = {
        {"per_direction", {{"left", direction_row(left)}, {"right", direction_row(right)}}},
        {"by_key", by_key},
        {"combined", counts_json(combined)},
    };
    section["sensitivity"] =
        combined.tp + combined.fn > 0 ? json(sensitivity(combined)) : json(nullptr);
    return section;
}

}  // namespace

std::string run_eval(const EvalInputs& inputs, const std::filesystem::path& report_path) {
    json report;
    report["config"] = {{"iou_thresholds", inputs.config.iou_thresholds},
                        {"event_match_window", inputs.config.event_match_window}};

    if (inputs.counts_file) {
        std::ifstream in(*inputs.counts_file);
        if (!in) throw IoError("cannot open counts file: " + inputs.counts_file->string());
        json doc;
        try {
            in >> doc;
        } catch (const json::exception& e) {
            throw FormatError("counts file: " + std::string(e.what()));
        }
        std::map<EventKey, ConfusionCounts> per_key;
        if (doc.contains("left"))
            per_key[{EventKind::change, Direction::left}] = counts_from_json(doc["left"]);
        if (doc.contains("right"))
            per_key[{EventKind::change, Direction::right}] = counts_from_json(doc["right"]);
        report["events"] = event_section(per_key);
    } else if (inputs.predicted_events && inputs.truth_events) {
        auto predicted = read_events_jsonl(*inputs.predicted_events);
        auto truth = read_events_jsonl(*inputs.truth_events);
        report["events"] = event_section(match_events(predicted, truth, inputs.config));
    }

    if (inputs.predicted_manifest && inputs.truth_manifest) {
        auto predictions = load_sequence(*inputs.predicted_manifest);
        auto truths = load_sequence(*inputs.truth_manifest);
        auto per_threshold = mask_confusion(predictions, truths, inputs.config);

        json rows = json::array();
        for (std::size_t t = 0; t < per_threshold.size(); ++t) {
            json row = counts_json(per_threshold[t]);
            row["threshold"] = inputs.config.iou_thresholds[t];
            const auto& c = per_threshold[t];
            const long long denom = c.tp + c.fp + c.fn;
            row["score"] = denom == 0 ? 1.0 : static_cast<double>(c.tp) / denom;
            rows.push_back(row);
        }
        report["masks"] = {
            {"per_threshold", rows},
            {"map", map_score(predictions, truths, inputs.config)},
        };
    }

    std::string text = report.dump(2) + "\n";
    std::filesystem::create_directories(report_path.parent_path());
    std::ofstream out(report_path, std::ios::binary);
    if (!out) throw IoError("cannot write report: " + report_path.string());
    out << text;
    if (!out) throw IoError("write failed: " + report_path.string());
    return text;
}

}  // namespace lanetrack
