#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "lanetrack/scenario.hpp"
#include "lanetrack/tracking.hpp"

using namespace lanetrack;
namespace fs = std::filesystem;

namespace {

Scenario lane_keep(int frames = 200) {
    Scenario s;
    s.duration_frames = frames;
    return s;
}

Scenario single_maneuver(EventKind kind, Direction dir, int start = 200, int duration = 80,
                         double amplitude = 120.0, int frames = 500) {
    Scenario s;
    s.duration_frames = frames;
    s.maneuvers.push_back({kind, dir, start, duration, amplitude});
    return s;
}

}  // namespace

TEST_CASE("validate: rejects malformed scenarios") {
    Scenario s = lane_keep();
    s.width = 0;
    CHECK_THROWS_AS(validate(s), InvalidScenario);

    s = lane_keep();
    s.maneuvers.push_back({EventKind::change, Direction::left, 50, 100, 120.0});
    s.maneuvers.push_back({EventKind::change, Direction::right, 100, 100, 120.0});
    CHECK_THROWS_AS(validate(s), InvalidScenario);  // overlap in time

    s = lane_keep();
    s.maneuvers.push_back({EventKind::change, Direction::left, 50, 100, -5.0});
    CHECK_THROWS_AS(validate(s), InvalidScenario);  // non-positive amplitude

    s = lane_keep(100);
    s.maneuvers.push_back({EventKind::change, Direction::left, 60, 80, 120.0});
    CHECK_THROWS_AS(validate(s), InvalidScenario);  // runs past the clip end

    s = lane_keep();
    s.noise.dropout_prob = 1.5;
    CHECK_THROWS_AS(validate(s), InvalidScenario);
}

TEST_CASE("lane keep with zero noise: no truth events, constant offsets") {
    auto clip = render_clip(lane_keep(), 1);
    CHECK(clip.truth_events.empty());
    REQUIRE(clip.masks.size() == 200);
    for (double v : clip.lateral_trajectory) CHECK(v == 0.0);

    auto raw = compute_offsets(clip.masks, nullptr);
    REQUIRE(raw.size() == 200);
    const double first = raw.samples[0].vertical_offset;
    for (const auto& sample : raw.samples) {
        REQUIRE(sample.valid);
        CHECK(sample.vertical_offset == doctest::Approx(first).epsilon(1e-12));
    }
}

TEST_CASE("left change truth log contains exactly (change, left, start_frame)") {
    auto scenario = single_maneuver(EventKind::change, Direction::left, 200);
    auto clip = render_clip(scenario, 7);
    REQUIRE(clip.truth_events.size() == 1);
    CHECK(clip.truth_events[0].kind == EventKind::change);
    CHECK(clip.truth_events[0].direction == Direction::left);
    CHECK(clip.truth_events[0].frame_index == 200);
}

TEST_CASE("maneuver_offset: left change ramps up, re-anchors negative, returns to zero") {
    auto scenario = single_maneuver(EventKind::change, Direction::left, 200, 80, 120.0);
    CHECK(maneuver_offset(scenario, 0) == 0.0);
    CHECK(maneuver_offset(scenario, 199) == 0.0);
    CHECK(maneuver_offset(scenario, 239) > 100.0);   // near the crossing peak
    CHECK(maneuver_offset(scenario, 240) == -120.0); // re-anchor to the new lane
    CHECK(maneuver_offset(scenario, 279) > -20.0);
    CHECK(maneuver_offset(scenario, 280) == 0.0);

    // Monotone rise over the first half.
    for (int t = 200; t < 239; ++t)
        CHECK(maneuver_offset(scenario, t) <= maneuver_offset(scenario, t + 1));
}

TEST_CASE("maneuver_offset: incursion is a single excursion with no re-anchor") {
    auto scenario = single_maneuver(EventKind::incursion, Direction::right, 100, 60, 80.0);
    CHECK(maneuver_offset(scenario, 99) == 0.0);
    CHECK(maneuver_offset(scenario, 130) == doctest::Approx(-80.0));  // right = negative
    CHECK(maneuver_offset(scenario, 160) == doctest::Approx(0.0).epsilon(1e-9));
    for (int t = 100; t < 160; ++t) CHECK(maneuver_offset(scenario, t) <= 0.0);
}

TEST_CASE("render determinism: same seed, same bytes; noise varies by seed") {
    auto scenario = single_maneuver(EventKind::change, Direction::right);
    scenario.noise.jitter_sigma = 2.0;
    scenario.noise.dropout_prob = 0.01;

    auto a = render_clip(scenario, 33);
    auto b = render_clip(scenario, 33);
    REQUIRE(a.masks.size() == b.masks.size());
    for (std::size_t i = 0; i < a.masks.size(); ++i)
        CHECK(a.masks[i].pixels == b.masks[i].pixels);

    auto c = render_clip(scenario, 34);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.masks.size() && !any_diff; ++i)
        any_diff = a.masks[i].pixels != c.masks[i].pixels;
    CHECK(any_diff);
}

TEST_CASE("mirror construction: right change renders the flipped left change") {
    auto left = render_clip(single_maneuver(EventKind::change, Direction::left), 5);
    auto right = render_clip(single_maneuver(EventKind::change, Direction::right), 5);
    REQUIRE(left.masks.size() == right.masks.size());
    for (std::size_t i = 0; i < left.masks.size(); ++i) {
        CAPTURE(i);
        REQUIRE(right.masks[i].pixels == flip_horizontal(left.masks[i]).pixels);
    }
}

TEST_CASE("dropout probability one empties every frame") {
    auto scenario = lane_keep(50);
    scenario.noise.dropout_prob = 1.0;
    auto clip = render_clip(scenario, 3);
    for (const auto& mask : clip.masks) CHECK(mask.empty_lane());
}

TEST_CASE("speckle adds isolated background pixels") {
    auto scenario = lane_keep(5);
    scenario.noise.speckle_prob = 0.01;
    auto clip = render_clip(scenario, 3);
    auto clean = render_clip(lane_keep(5), 3);
    CHECK(clip.masks[0].lane_pixel_count() > clean.masks[0].lane_pixel_count());
}

TEST_CASE("generate writes a loadable manifest, frames, truth log, trajectory") {
    auto dir = fs::temp_directory_path() / "lanetrack_scenario_test";
    fs::remove_all(dir);
    auto scenario = single_maneuver(EventKind::incursion, Direction::left, 100, 60, 80.0, 250);
    auto manifest_path = generate(scenario, 11, dir);

    auto manifest = load_manifest(manifest_path);
    CHECK(manifest.fps == scenario.fps);
    CHECK(manifest.width == scenario.width);
    REQUIRE(manifest.entries.size() == 250);

    auto mask = load_mask(dir / manifest.entries[120].path);
    CHECK(mask.width == scenario.width);
    CHECK_FALSE(mask.empty_lane());

    auto truth = read_events_jsonl(dir / "truth_events.jsonl");
    REQUIRE(truth.size() == 1);
    CHECK(truth[0].kind == EventKind::incursion);
    CHECK(truth[0].frame_index == 100);

    std::ifstream traj(dir / "trajectory.csv");
    REQUIRE(traj.good());
    std::string line;
    std::getline(traj, line);
    CHECK(line == "frame_index,lateral_offset");
    int rows = 0;
    while (std::getline(traj, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 250);
}

TEST_CASE("load_scenario parses the flat key-value format") {
    auto dir = fs::temp_directory_path() / "lanetrack_scenario_test";
    fs::create_directories(dir);
    auto path = dir / "test.scenario";
    {
        std::ofstream out(path);
        out << "# demo scenario\n"
            << "width=640\n"
            << "height=400\n"
            << "fps=30\n"
            << "duration_frames=450\n"
            << "jitter_sigma=1.5\n"
            << "dropout_prob=0.02\n"
            << "maneuver=change,left,100,80,110\n"
            << "maneuver=incursion,right,300,60,70\n";
    }
    auto s = load_scenario(path);
    CHECK(s.width == 640);
    CHECK(s.height == 400);
    CHECK(s.fps == 30.0);
    CHECK(s.duration_frames == 450);
    CHECK(s.noise.jitter_sigma == 1.5);
    CHECK(s.noise.dropout_prob == 0.02);
    REQUIRE(s.maneuvers.size() == 2);
    CHECK(s.maneuvers[0].direction == Direction::left);
    CHECK(s.maneuvers[1].kind == EventKind::incursion);
    CHECK(s.maneuvers[1].lateral_amplitude == 70.0);

    {
        std::ofstream out(path);
        out << "width=nonsense\n";
    }
    CHECK_THROWS_AS(load_scenario(path), InvalidScenario);
}
