#include "lanetrack/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace lanetrack {

namespace {

double smoothstep(double u) {
    u = std::clamp(u, 0.0, 1.0);
    return u * u * (3.0 - 2.0 * u);
}

double direction_sign(Direction dir) { return dir == Direction::left ? 1.0 : -1.0; }

}  // namespace

void validate(const Scenario& s) {
    if (s.width <= 0 || s.height <= 0) throw InvalidScenario("non-positive frame size");
    if (s.fps <= 0.0) throw InvalidScenario("non-positive fps");
    if (s.duration_frames <= 0) throw InvalidScenario("non-positive duration");
    if (s.noise.jitter_sigma < 0.0) throw InvalidScenario("negative jitter sigma");
    if (s.noise.dropout_prob < 0.0 || s.noise.dropout_prob > 1.0)
        throw InvalidScenario("dropout probability outside [0,1]");
    if (s.noise.speckle_prob < 0.0 || s.noise.speckle_prob > 1.0)
        throw InvalidScenario("speckle probability outside [0,1]");

    auto sorted = s.maneuvers;
    std::sort(sorted.begin(), sorted.end(),
              [](const Maneuver& a, const Maneuver& b) { return a.start_frame < b.start_frame; });
    int prev_end = 0;
    for (const auto& m : sorted) {
        if (m.lateral_amplitude <= 0.0) throw InvalidScenario("non-positive amplitude");
        if (m.duration_frames <= 0) throw InvalidScenario("non-positive maneuver duration");
        if (m.start_frame < 0) throw InvalidScenario("negative maneuver start");
        if (m.start_frame < prev_end) throw InvalidScenario("maneuvers overlap in time");
        if (m.start_frame + m.duration_frames > s.duration_frames)
            throw InvalidScenario("maneuver runs past the clip end");
        if (m.direction == Direction::none) throw InvalidScenario("maneuver needs a direction");
        prev_end = m.start_frame + m.duration_frames;
    }
}

double maneuver_offset(const Scenario& scenario, int frame) {
    for (const auto& m : scenario.maneuvers) {
        const int s = frame - m.start_frame;
        if (s < 0 || s >= m.duration_frames) continue;
        const double sign = direction_sign(m.direction);
        if (m.kind == EventKind::incursion) {
            // Smooth excursion out and back, no re-anchor.
            double u = static_cast<double>(s) / m.duration_frames;
            double wave = std::sin(M_PI * u);
            return sign * m.lateral_amplitude * wave * wave;
        }
        // Lane change: ramp toward the boundary, then a discrete re-anchor to
        // the newly occupied lane decaying back to center.
        const int half = m.duration_frames / 2;
        if (s < half)
            return sign * m.lateral_amplitude * smoothstep(static_cast<double>(s) / half);
        double u = static_cast<double>(s - half) / (m.duration_frames - half);
        return -sign * m.lateral_amplitude * (1.0 - smoothstep(u));
    }
    return 0.0;
}

namespace {

struct QuadCorner {
    double u;  // displacement from the pixel-grid center axis (width-1)/2
    double y;
};

// Fills one frame's trapezoid. All horizontal positions run through the
// displacement coordinate u = x - axis; IEEE negation is exact, so a
// maneuver mirrored about the axis rasterizes to the exactly mirrored
// pixel set.
void rasterize_quad(Mask& mask, const std::array<QuadCorner, 4>& corners, double axis) {
    double y_min = corners[0].y, y_max = corners[0].y;
    for (const auto& c : corners) {
        y_min = std::min(y_min, c.y);
        y_max = std::max(y_max, c.y);
    }
    const int row_begin = std::max(0, static_cast<int>(std::ceil(y_min)));
    const int row_end = std::min(mask.height - 1, static_cast<int>(std::floor(y_max)));

    for (int y = row_begin; y <= row_end; ++y) {
        double u_lo = std::numeric_limits<double>::infinity();
        double u_hi = -u_lo;
        for (std::size_t e = 0; e < 4; ++e) {
            const QuadCorner& p = corners[e];
            const QuadCorner& q = corners[(e + 1) % 4];
            const double yd = static_cast<double>(y);
            if ((yd - p.y) * (yd - q.y) > 0.0) continue;
            if (p.y == q.y) {
                u_lo = std::min({u_lo, p.u, q.u});
                u_hi = std::max({u_hi, p.u, q.u});
            } else {
                double u = p.u + (yd - p.y) * (q.u - p.u) / (q.y - p.y);
                u_lo = std::min(u_lo, u);
                u_hi = std::max(u_hi, u);
            }
        }
        if (!(u_lo <= u_hi)) continue;

        const int x_begin =
            std::max(0, static_cast<int>(std::floor(axis + u_lo)) - 1);
        const int x_end =
            std::min(mask.width - 1, static_cast<int>(std::ceil(axis + u_hi)) + 1);
        for (int x = x_begin; x <= x_end; ++x) {
            const double u = x - axis;  // exact: half-integer grid
            if (u >= u_lo && u <= u_hi) mask.set(x, y, 1);
        }
    }
}

}  // namespace

SyntheticClip render_clip(const Scenario& scenario, std::uint64_t seed) {
    validate(scenario);

    const double axis = (scenario.width - 1) / 2.0;
    const int y_bottom = scenario.height - 1;
    const int y_top = y_bottom - static_cast<int>(0.45 * scenario.height);
    const double half_bottom = 0.20 * scenario.width;
    const double half_top = 0.05 * scenario.width;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> jitter(0.0, 1.0);
    std::bernoulli_distribution dropout(scenario.noise.dropout_prob);

    SyntheticClip clip;
    clip.masks.reserve(static_cast<std::size_t>(scenario.duration_frames));
    clip.lateral_trajectory.reserve(static_cast<std::size_t>(scenario.duration_frames));

    for (int t = 0; t < scenario.duration_frames; ++t) {
        const double f = maneuver_offset(scenario, t);
        clip.lateral_trajectory.push_back(f);

        Mask mask = Mask::zeros(scenario.width, scenario.height, t);
        if (!dropout(rng)) {
            std::array<QuadCorner, 4> corners = {{
                {f - half_bottom, static_cast<double>(y_bottom)},
                {f + half_bottom, static_cast<double>(y_bottom)},
                {f + half_top, static_cast<double>(y_top)},
                {f - half_top, static_cast<double>(y_top)},
            }};
            if (scenario.noise.jitter_sigma > 0.0) {
                for (auto& c : corners) {
                    c.u += scenario.noise.jitter_sigma * jitter(rng);
                    c.y += scenario.noise.jitter_sigma * jitter(rng);
                }
            }
            rasterize_quad(mask, corners, axis);

            if (scenario.noise.speckle_prob > 0.0) {
                std::bernoulli_distribution speckle(scenario.noise.speckle_prob);
                for (auto& px : mask.pixels)
                    if (!px && speckle(rng)) px = 1;
            }
        }
        clip.masks.push_back(std::move(mask));
    }

    for (const auto& m : scenario.maneuvers) {
        LaneEvent ev;
        ev.kind = m.kind;
        ev.direction = m.direction;
        ev.frame_index = m.start_frame;
        clip.truth_events.push_back(ev);
    }
    std::sort(clip.truth_events.begin(), clip.truth_events.end(),
              [](const LaneEvent& a, const LaneEvent& b) {
                  return a.frame_index < b.frame_index;
              });
    return clip;
}

std::filesystem::path generate(const Scenario& scenario, std::uint64_t seed,
                               const std::filesystem::path& out_dir) {
    auto clip = render_clip(scenario, seed);

    std::filesystem::create_directories(out_dir / "frames");

    SequenceManifest manifest;
    manifest.fps = scenario.fps;
    manifest.width = scenario.width;
    manifest.height = scenario.height;

    for (const auto& mask : clip.masks) {
        char name[32];
        std::snprintf(name, sizeof(name), "frames/%06d.pgm", mask.frame_index);
        save_mask(out_dir / name, mask);
        manifest.entries.push_back({mask.frame_index, name});
    }

    const auto manifest_path = out_dir / "clip.manifest";
    save_manifest(manifest_path, manifest);
    write_events_jsonl(out_dir / "truth_events.jsonl", clip.truth_events, scenario.fps);

    std::ofstream traj(out_dir / "trajectory.csv");
    if (!traj) throw IoError("cannot write trajectory: " + (out_dir / "trajectory.csv").string());
    traj << "frame_index,lateral_offset\n";
    for (std::size_t t = 0; t < clip.lateral_trajectory.size(); ++t) {
        char row[64];
        std::snprintf(row, sizeof(row), "%zu,%.10g\n", t, clip.lateral_trajectory[t]);
        traj << row;
    }
    return manifest_path;
}

namespace {

double parse_double(const std::string& value, const std::string& key) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw InvalidScenario("scenario: bad value for " + key + ": '" + value + "'");
    }
    if (pos != value.size())
        throw InvalidScenario("scenario: trailing junk in " + key + ": '" + value + "'");
    return v;
}

int parse_int(const std::string& value, const std::string& key) {
    double v = parse_double(value, key);
    if (v != std::floor(v)) throw InvalidScenario("scenario: " + key + " must be an integer");
    return static_cast<int>(v);
}

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r");
    auto end = s.find_last_not_of(" \t\r");
    return begin == std::string::npos ? "" : s.substr(begin, end - begin + 1);
}

Maneuver parse_maneuver(const std::string& value) {
    std::vector<std::string> fields;
    std::stringstream ss(value);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (fields.size() != 5)
        throw InvalidScenario(
            "scenario: maneuver needs kind,direction,start_frame,duration_frames,amplitude");
    Maneuver m;
    try {
        m.kind = event_kind_from_string(fields[0]);
        m.direction = direction_from_string(fields[1]);
    } catch (const FormatError& e) {
        throw InvalidScenario(std::string("scenario: ") + e.what());
    }
    m.start_frame = parse_int(fields[2], "maneuver start_frame");
    m.duration_frames = parse_int(fields[3], "maneuver duration_frames");
    m.lateral_amplitude = parse_double(fields[4], "maneuver amplitude");
    return m;
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario: " + path.string());

    Scenario s;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidScenario("scenario line " + std::to_string(line_no) +
                                  ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "width")
            s.width = parse_int(value, key);
        else if (key == "height")
            s.height = parse_int(value, key);
        else if (key == "fps")
            s.fps = parse_double(value, key);
        else if (key == "duration_frames")
            s.duration_frames = parse_int(value, key);
        else if (key == "jitter_sigma")
            s.noise.jitter_sigma = parse_double(value, key);
        else if (key == "dropout_prob")
            s.noise.dropout_prob = parse_double(value, key);
        else if (key == "speckle_prob")
            s.noise.speckle_prob = parse_double(value, key);
        else if (key == "maneuver")
            s.maneuvers.push_back(parse_maneuver(value));
        else
            throw InvalidScenario("scenario: unknown key '" + key + "'");
    }
    validate(s);
    return s;
}

}  // namespace lanetrack
