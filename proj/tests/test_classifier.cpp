#include <cmath>
#include <random>

#include "doctest.h"
#include "lanetrack/classifier.hpp"

using namespace lanetrack;

namespace {

OffsetSeries smoothed_series(const std::vector<double>& values) {
    OffsetSeries s;
    s.stage = SeriesStage::smoothed;
    for (std::size_t i = 0; i < values.size(); ++i) {
        OffsetSample sample;
        sample.frame_index = static_cast<int>(i);
        sample.vertical_offset = values[i];
        sample.valid = true;
        s.samples.push_back(sample);
    }
    return s;
}

// Gaussian bump of the given amplitude centered at t0.
std::vector<double> with_bump(std::vector<double> base, int t0, double amplitude,
                              double width = 10.0) {
    for (std::size_t t = 0; t < base.size(); ++t) {
        double d = (static_cast<double>(t) - t0) / width;
        base[t] += amplitude * std::exp(-0.5 * d * d);
    }
    return base;
}

std::vector<Extremum> detect(const std::vector<double>& values, const PeakConfig& cfg = {}) {
    return detect_peaks(smoothed_series(values), cfg);
}

}  // namespace

TEST_CASE("mirror_series: negation and involution") {
    auto s = smoothed_series({1, -2, 3});
    auto m = mirror_series(s);
    CHECK(m.samples[0].vertical_offset == -1);
    CHECK(m.samples[1].vertical_offset == 2);
    CHECK(m.samples[2].vertical_offset == -3);

    auto zeros = mirror_series(smoothed_series({0, 0, 0}));
    for (const auto& sample : zeros.samples) CHECK(sample.vertical_offset == 0);

    auto twice = mirror_series(mirror_series(s));
    for (std::size_t i = 0; i < s.size(); ++i)
        CHECK(twice.samples[i].vertical_offset == s.samples[i].vertical_offset);
}

TEST_CASE("detect_peaks: flat series has no extrema") {
    CHECK(detect(std::vector<double>(200, 0.0)).empty());
}

TEST_CASE("detect_peaks: single bump gives one peak at its center") {
    auto extrema = detect(with_bump(std::vector<double>(300, 0.0), 100, 30.0));
    REQUIRE(extrema.size() == 1);
    CHECK(extrema[0].frame_index == 100);
    CHECK(extrema[0].kind == ExtremumKind::peak);
    CHECK(extrema[0].amplitude == doctest::Approx(30.0).epsilon(0.01));
}

TEST_CASE("detect_peaks: bump and depression give a peak and a trough") {
    auto values = with_bump(with_bump(std::vector<double>(300, 0.0), 100, 30.0), 130, -25.0);
    auto extrema = detect(values);
    REQUIRE(extrema.size() == 2);
    CHECK(extrema[0].frame_index == doctest::Approx(100).epsilon(0.05));
    CHECK(extrema[0].kind == ExtremumKind::peak);
    CHECK(extrema[0].amplitude > 0);
    CHECK(extrema[1].frame_index == doctest::Approx(130).epsilon(0.05));
    CHECK(extrema[1].kind == ExtremumKind::trough);
    CHECK(extrema[1].amplitude < 0);
}

TEST_CASE("detect_peaks: prominence threshold suppresses small wiggles") {
    auto values = with_bump(std::vector<double>(300, 0.0), 80, 30.0);
    values = with_bump(values, 200, 6.0);  // below the 10 px default
    auto extrema = detect(values);
    REQUIRE(extrema.size() == 1);
    CHECK(extrema[0].frame_index == 80);
}

TEST_CASE("detect_peaks: close same-kind peaks collapse to the stronger one") {
    PeakConfig cfg;
    cfg.min_peak_distance = 20;
    auto values = with_bump(std::vector<double>(300, 0.0), 100, 30.0, 4.0);
    values = with_bump(values, 110, 22.0, 4.0);
    auto extrema = detect(values, cfg);
    REQUIRE(extrema.size() == 1);
    CHECK(extrema[0].frame_index == 100);
}

TEST_CASE("detect_peaks: plateau peak resolves to its middle") {
    std::vector<double> values(100, 0.0);
    for (int t = 40; t <= 44; ++t) values[t] = 20.0;
    auto extrema = detect(values);
    REQUIRE(extrema.size() == 1);
    CHECK(extrema[0].frame_index == 42);
}

TEST_CASE("detect_peaks: near-baseline wiggle between big excursions is rejected") {
    // A change (trough then peak) followed by an incursion peak, with a tiny
    // dip between them. The dip's prominence is large (deep neighbors) but
    // its amplitude is under the threshold; keeping it would pair it with
    // the incursion's peak into a phantom change.
    auto values = with_bump(std::vector<double>(500, 0.0), 190, -120.0);
    values = with_bump(values, 210, 115.0);
    values = with_bump(values, 284, -6.0, 6.0);
    values = with_bump(values, 349, 56.0);
    auto extrema = detect(values);
    REQUIRE(extrema.size() == 3);
    CHECK(extrema[0].kind == ExtremumKind::trough);
    CHECK(extrema[1].kind == ExtremumKind::peak);
    CHECK(extrema[2].kind == ExtremumKind::peak);

    auto events = classify_events(extrema, PeakConfig{});
    REQUIRE(events.size() == 2);
    CHECK(events[0].kind == EventKind::change);
    CHECK(events[0].direction == Direction::right);
    CHECK(events[1].kind == EventKind::incursion);
    CHECK(events[1].direction == Direction::left);
    CHECK(events[1].frame_index == 349);
}

TEST_CASE("detect_peaks: requires a smoothed-stage series") {
    OffsetSeries raw;
    raw.stage = SeriesStage::raw;
    raw.samples.push_back({0, 1.0, 0.0, true});
    CHECK_THROWS(detect_peaks(raw, PeakConfig{}));
}

TEST_CASE("classify_events: no extrema, no events") {
    CHECK(classify_events({}, PeakConfig{}).empty());
}

TEST_CASE("classify_events: peak then trough is a left change anchored at the peak") {
    std::vector<Extremum> extrema = {{100, 30.0, ExtremumKind::peak},
                                     {130, -25.0, ExtremumKind::trough}};
    auto events = classify_events(extrema, PeakConfig{});
    REQUIRE(events.size() == 1);
    CHECK(events[0].kind == EventKind::change);
    CHECK(events[0].direction == Direction::left);
    CHECK(events[0].frame_index == 100);
    CHECK(events[0].peak_frame == 100);
    CHECK(events[0].trough_frame == 130);
    CHECK(events[0].peak_amplitude == 30.0);
    CHECK(events[0].trough_amplitude == -25.0);
}

TEST_CASE("classify_events: trough then peak is a right change anchored at the trough") {
    std::vector<Extremum> extrema = {{50, -20.0, ExtremumKind::trough},
                                     {90, 24.0, ExtremumKind::peak}};
    auto events = classify_events(extrema, PeakConfig{});
    REQUIRE(events.size() == 1);
    CHECK(events[0].kind == EventKind::change);
    CHECK(events[0].direction == Direction::right);
    CHECK(events[0].frame_index == 50);
    CHECK(events[0].peak_frame == 90);
    CHECK(events[0].trough_frame == 50);
}

TEST_CASE("classify_events: lone peak beyond pairing range becomes an incursion") {
    std::vector<Extremum> extrema = {{200, 15.0, ExtremumKind::peak}};
    auto events = classify_events(extrema, PeakConfig{});
    REQUIRE(events.size() == 1);
    CHECK(events[0].kind == EventKind::incursion);
    CHECK(events[0].direction == Direction::left);
    CHECK(events[0].frame_index == 200);
    CHECK(events[0].peak_frame == 200);
    CHECK_FALSE(events[0].trough_frame.has_value());

    // A trough-only series is a right incursion.
    std::vector<Extremum> trough = {{80, -15.0, ExtremumKind::trough}};
    auto right = classify_events(trough, PeakConfig{});
    REQUIRE(right.size() == 1);
    CHECK(right[0].kind == EventKind::incursion);
    CHECK(right[0].direction == Direction::right);
}

TEST_CASE("classify_events: pair distance gate") {
    PeakConfig cfg;
    cfg.max_pair_distance = 75;
    std::vector<Extremum> apart = {{100, 30.0, ExtremumKind::peak},
                                   {190, -25.0, ExtremumKind::trough}};
    auto events = classify_events(apart, cfg);
    REQUIRE(events.size() == 2);
    CHECK(events[0].kind == EventKind::incursion);
    CHECK(events[1].kind == EventKind::incursion);

    std::vector<Extremum> at_limit = {{100, 30.0, ExtremumKind::peak},
                                      {175, -25.0, ExtremumKind::trough}};
    auto paired = classify_events(at_limit, cfg);
    REQUIRE(paired.size() == 1);
    CHECK(paired[0].kind == EventKind::change);
}

TEST_CASE("classify_events: each extremum participates in at most one event") {
    // peak, trough, trough: the second trough stays unpaired.
    std::vector<Extremum> extrema = {{100, 30.0, ExtremumKind::peak},
                                     {120, -25.0, ExtremumKind::trough},
                                     {150, -18.0, ExtremumKind::trough}};
    PeakConfig cfg;
    cfg.shallowness_factor = 0.0;  // keep the lone trough visible
    auto events = classify_events(extrema, cfg);
    REQUIRE(events.size() == 2);
    CHECK(events[0].kind == EventKind::change);
    CHECK(events[0].trough_frame == 120);
    CHECK(events[1].kind == EventKind::incursion);
    CHECK(events[1].frame_index == 150);
}

TEST_CASE("classify_events: invert_direction swaps every emitted direction") {
    std::vector<Extremum> extrema = {{100, 30.0, ExtremumKind::peak},
                                     {130, -25.0, ExtremumKind::trough},
                                     {300, 15.0, ExtremumKind::peak}};
    PeakConfig cfg;
    cfg.shallowness_factor = 0.0;
    auto normal = classify_events(extrema, cfg);
    cfg.invert_direction = true;
    auto inverted = classify_events(extrema, cfg);
    REQUIRE(normal.size() == inverted.size());
    for (std::size_t i = 0; i < normal.size(); ++i) {
        CHECK(normal[i].kind == inverted[i].kind);
        CHECK(normal[i].frame_index == inverted[i].frame_index);
        CHECK(inverted[i].direction ==
              (normal[i].direction == Direction::left ? Direction::right : Direction::left));
    }
}

TEST_CASE("classifier mirror symmetry: mirrored series swaps left and right") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> noise(0.0, 1.5);
    PeakConfig cfg;
    cfg.shallowness_factor = 0.0;

    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> values(400, 0.0);
        std::uniform_int_distribution<int> where(30, 250);
        int a = where(rng), b = a + 40 + trial, c = a + 160;
        values = with_bump(values, a, 25.0 + trial);
        values = with_bump(values, b, -20.0);
        values = with_bump(values, c, 14.0);
        for (auto& v : values) v += noise(rng);

        auto series = smoothed_series(values);
        auto events = classify_events(detect_peaks(series, cfg), cfg);
        auto mirrored = classify_events(detect_peaks(mirror_series(series), cfg), cfg);

        REQUIRE(events.size() == mirrored.size());
        for (std::size_t i = 0; i < events.size(); ++i) {
            CHECK(events[i].kind == mirrored[i].kind);
            CHECK(events[i].frame_index == mirrored[i].frame_index);
            if (events[i].direction != Direction::none) {
                CHECK(mirrored[i].direction == (events[i].direction == Direction::left
                                                    ? Direction::right
                                                    : Direction::left));
            }
        }
    }
}

TEST_CASE("classifier scale invariance above the prominence threshold") {
    auto values = with_bump(with_bump(std::vector<double>(300, 0.0), 100, 30.0), 140, -24.0);
    PeakConfig cfg;
    auto base = classify_events(detect_peaks(smoothed_series(values), cfg), cfg);

    for (double k : {1.5, 3.0, 10.0}) {
        std::vector<double> scaled;
        for (double v : values) scaled.push_back(k * v);
        auto events = classify_events(detect_peaks(smoothed_series(scaled), cfg), cfg);
        REQUIRE(events.size() == base.size());
        for (std::size_t i = 0; i < events.size(); ++i) {
            CHECK(events[i].kind == base[i].kind);
            CHECK(events[i].direction == base[i].direction);
            CHECK(events[i].frame_index == base[i].frame_index);
        }
    }
}

TEST_CASE("classifier false-alarm guard: smoothed lane-keep noise emits nothing") {
    PeakConfig cfg;
    for (int seed = 0; seed < 25; ++seed) {
        std::mt19937_64 rng(5000 + seed);
        std::normal_distribution<double> noise(0.0, cfg.min_prominence / 4.0);
        OffsetSeries centered;
        centered.stage = SeriesStage::centered;
        for (int t = 0; t < 500; ++t)
            centered.samples.push_back({t, noise(rng), 0.0, true});
        auto smoothed = kalman_smooth(centered, KalmanConfig{});
        auto events = classify_events(detect_peaks(smoothed, cfg), cfg);
        CHECK(events.empty());
    }
}

TEST_CASE("classify_events: shallowness ceiling drops tall unpaired extrema") {
    // Two clear changes of amplitude ~30 set the ceiling at 0.6 * 30 = 18.
    std::vector<Extremum> extrema = {
        {100, 30.0, ExtremumKind::peak},  {130, -30.0, ExtremumKind::trough},
        {300, -30.0, ExtremumKind::trough}, {330, 30.0, ExtremumKind::peak},
        {500, 25.0, ExtremumKind::peak},   // too tall for an incursion
        {700, 12.0, ExtremumKind::peak},   // shallow: a real incursion
    };
    auto events = classify_events(extrema, PeakConfig{});
    REQUIRE(events.size() == 3);
    CHECK(events[0].kind == EventKind::change);
    CHECK(events[1].kind == EventKind::change);
    CHECK(events[2].kind == EventKind::incursion);
    CHECK(events[2].frame_index == 700);

    PeakConfig no_gate;
    no_gate.shallowness_factor = 0.0;
    CHECK(classify_events(extrema, no_gate).size() == 4);
}
