// lanetrack: offline lane-departure analysis over per-frame lane masks.
//
//   run    full pipeline over a mask manifest (offsets, events, summary)
//   eval   mask- and event-level metrics against ground truth
//   synth  render a synthetic clip from a scenario file
//   hull   debug: hull vertices and centroid offsets for a single mask

#include <algorithm>
#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lanetrack/pipeline.hpp"

namespace {

using namespace lanetrack;

void add_pipeline_options(CLI::App* cmd, PipelineConfig& cfg) {
    cmd->add_option("--lag", cfg.kalman.lag, "Fixed smoothing lag in frames")
        ->envname("LANETRACK_LAG")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--process-noise", cfg.kalman.process_noise,
                    "Kalman process noise (px^2/frame^2)")
        ->envname("LANETRACK_PROCESS_NOISE")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--measurement-noise", cfg.kalman.measurement_noise,
                    "Kalman measurement noise (px^2)")
        ->envname("LANETRACK_MEASUREMENT_NOISE")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--prominence", cfg.peaks.min_prominence,
                    "Minimum peak prominence (px)")
        ->envname("LANETRACK_PROMINENCE")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--min-peak-distance", cfg.peaks.min_peak_distance,
                    "Minimum frames between same-kind peaks")
        ->envname("LANETRACK_MIN_PEAK_DISTANCE")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--max-pair-distance", cfg.peaks.max_pair_distance,
                    "Maximum frames between a peak and its depression zone")
        ->envname("LANETRACK_MAX_PAIR_DISTANCE")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_flag("--invert-direction", cfg.peaks.invert_direction,
                  "Swap the left/right sign convention")
        ->envname("LANETRACK_INVERT_DIRECTION");
    cmd->add_option("--shallowness-factor", cfg.peaks.shallowness_factor,
                    "Incursion ceiling as a fraction of the median change amplitude")
        ->capture_default_str();
    cmd->add_flag_callback(
        "--no-shallowness-gate", [&cfg] { cfg.peaks.shallowness_factor = 0.0; },
        "Disable the incursion shallowness ceiling");
    cmd->add_option("--max-points", cfg.max_points, "Hull input budget per frame")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--center-window", cfg.center_window,
                    "Sliding-mean half-width in frames (0 = whole-clip mean)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--max-gap", cfg.max_gap_frames,
                    "Invalid-run length that splits the series (0 = round(fps))")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
}

int cmd_run(const RunConfig& cfg) {
    auto result = run_pipeline(cfg);
    std::size_t changes = 0, incursions = 0;
    for (const auto& ev : result.events)
        (ev.kind == EventKind::change ? changes : incursions) += 1;
    std::printf("%zu frames, %zu segment(s), %zu change(s), %zu incursion(s)\n",
                result.raw.size(), result.segments.size(), changes, incursions);
    std::printf("artifacts written to %s\n", cfg.output_dir.string().c_str());
    return 0;
}

int cmd_eval(const EvalInputs& inputs, const std::filesystem::path& report_path) {
    run_eval(inputs, report_path);
    std::printf("report written to %s\n", report_path.string().c_str());
    return 0;
}

int cmd_synth(const std::filesystem::path& scenario_path, std::uint64_t seed,
              const std::filesystem::path& out_dir) {
    auto scenario = load_scenario(scenario_path);
    auto manifest_path = generate(scenario, seed, out_dir);
    std::printf("%d frames rendered, manifest at %s\n", scenario.duration_frames,
                manifest_path.string().c_str());
    return 0;
}

int cmd_hull(const std::filesystem::path& mask_path,
             const std::optional<std::filesystem::path>& roi_path, int max_points) {
    Mask mask = load_mask(mask_path);
    if (roi_path) mask = apply_roi(mask, load_mask(*roi_path));

    auto points = mask_to_points(mask, max_points);
    auto hull = quickhull(points);
    auto centroid = polygon_centroid(hull);

    nlohmann::json vertices = nlohmann::json::array();
    for (const auto& v : hull.vertices) vertices.push_back({v.x, v.y});
    nlohmann::json out = {
        {"lane_pixels", mask.lane_pixel_count()},
        {"hull_vertices", vertices},
        {"centroid", {centroid.x, centroid.y}},
        {"vertical_offset", signed_center_offset(centroid, mask.width / 2.0)},
        {"horizontal_offset",
         point_line_distance(Line2D::horizontal(mask.height), centroid)},
    };
    std::printf("%s\n", out.dump(2).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lane departure event extraction from lane segmentation masks"};
    app.require_subcommand(1);

    // run
    RunConfig run_cfg;
    auto* run = app.add_subcommand("run", "Track a mask sequence and extract lane events");
    run->add_option("--manifest", run_cfg.manifest_path, "Sequence manifest file")
        ->required();
    std::string roi_arg;
    run->add_option("--roi", roi_arg, "ROI skim mask (PGM; 0 conceals)");
    run->add_option("--out", run_cfg.output_dir, "Output directory")->required();
    add_pipeline_options(run, run_cfg.pipeline);
    run->set_config("--config", "", "Read options from an INI config file");

    // eval
    EvalInputs eval_inputs;
    std::filesystem::path report_path = "report.json";
    auto* eval = app.add_subcommand("eval", "Score predictions against ground truth");
    std::string pred_events, truth_events, pred_manifest, truth_manifest, counts;
    eval->add_option("--pred-events", pred_events, "Predicted event log (JSONL)");
    eval->add_option("--truth-events", truth_events, "Ground-truth event log (JSONL)");
    eval->add_option("--pred-manifest", pred_manifest, "Predicted mask manifest");
    eval->add_option("--truth-manifest", truth_manifest, "Ground-truth mask manifest");
    eval->add_option("--counts", counts, "Direct confusion-counts JSON file");
    eval->add_option("--iou-threshold", eval_inputs.config.iou_thresholds,
                     "IoU threshold(s) for mask scoring")
        ->envname("LANETRACK_IOU_THRESHOLD")
        ->check(CLI::Range(0.0, 1.0));
    eval->add_option("--match-window", eval_inputs.config.event_match_window,
                     "Event matching window in frames")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    eval->add_option("--out", report_path, "Report path")->capture_default_str();

    // synth
    std::filesystem::path scenario_path, synth_out;
    std::uint64_t seed = 0;
    auto* synth = app.add_subcommand("synth", "Render a synthetic clip from a scenario");
    synth->add_option("--scenario", scenario_path, "Scenario key=value file")->required();
    synth->add_option("--seed", seed, "Random seed")
        ->envname("LANETRACK_SEED")
        ->capture_default_str();
    synth->add_option("--out", synth_out, "Output directory")->required();

    // hull
    std::filesystem::path hull_mask;
    std::string hull_roi;
    int hull_max_points = 4096;
    auto* hull = app.add_subcommand("hull", "Hull vertices and centroid for one mask");
    hull->add_option("--mask", hull_mask, "Mask file (PGM)")->required();
    hull->add_option("--roi", hull_roi, "ROI skim mask");
    hull->add_option("--max-points", hull_max_points, "Hull input budget")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (!roi_arg.empty()) run_cfg.roi_path = roi_arg;
            return cmd_run(run_cfg);
        }
        if (eval->parsed()) {
            if (!pred_events.empty()) eval_inputs.predicted_events = pred_events;
            if (!truth_events.empty()) eval_inputs.truth_events = truth_events;
            if (!pred_manifest.empty()) eval_inputs.predicted_manifest = pred_manifest;
            if (!truth_manifest.empty()) eval_inputs.truth_manifest = truth_manifest;
            if (!counts.empty()) eval_inputs.counts_file = counts;
            auto& thresholds = eval_inputs.config.iou_thresholds;
            std::sort(thresholds.begin(), thresholds.end());
            thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                             thresholds.end());
            return cmd_eval(eval_inputs, report_path);
        }
        if (synth->parsed()) return cmd_synth(scenario_path, seed, synth_out);
        if (hull->parsed())
            return cmd_hull(hull_mask,
                            hull_roi.empty()
                                ? std::nullopt
                                : std::optional<std::filesystem::path>(hull_roi),
                            hull_max_points);
    } catch (const lanetrack::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
