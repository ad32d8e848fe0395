#include "lanetrack/tracking.hpp"

#include <cmath>
#include <stdexcept>

#include "lanetrack/geometry.hpp"

namespace lanetrack {

namespace {

struct Vec2 {
    double p = 0.0, v = 0.0;
};

struct Mat2 {
    // [[a, b], [c, d]]
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    static Mat2 identity() { return {1, 0, 0, 1}; }

    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Vec2 operator*(const Vec2& x) const { return {a * x.p + b * x.v, c * x.p + d * x.v}; }
    Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    Mat2 transpose() const { return {a, c, b, d}; }
    Mat2 inverse() const {
        double det = a * d - b * c;
        return {d / det, -b / det, -c / det, a / det};
    }
};

Mat2 transition(double dt) { return {1.0, dt, 0.0, 1.0}; }

// White-acceleration process noise for a constant-velocity state.
Mat2 process_cov(double q, double dt) {
    double dt2 = dt * dt, dt3 = dt2 * dt, dt4 = dt3 * dt;
    return {q * dt4 / 4.0, q * dt3 / 2.0, q * dt3 / 2.0, q * dt2};
}

}  // namespace

OffsetSeries compute_offsets(const std::vector<Mask>& masks, const RoiMask* roi,
                             int max_points) {
    if (masks.empty()) throw EmptySequence("compute_offsets: no frames");
    for (std::size_t i = 1; i < masks.size(); ++i)
        if (masks[i].frame_index <= masks[i - 1].frame_index)
            throw std::invalid_argument(
                "compute_offsets: frame indices must be strictly increasing");

    OffsetSeries series;
    series.stage = SeriesStage::raw;
    series.samples.reserve(masks.size());

    for (const Mask& frame : masks) {
        OffsetSample sample;
        sample.frame_index = frame.frame_index;
        try {
            const Mask filtered = roi ? apply_roi(frame, *roi) : frame;
            auto points = mask_to_points(filtered, max_points);
            auto centroid = polygon_centroid(quickhull(points));
            sample.vertical_offset = signed_center_offset(centroid, frame.width / 2.0);
            sample.horizontal_offset = point_line_distance(
                Line2D::horizontal(static_cast<double>(frame.height)), centroid);
            sample.valid = true;
        } catch (const EmptyMask&) {
            // no detection this frame
        } catch (const DegenerateInput&) {
            // too few pixels or a collinear sliver; treat as no detection
        }
        series.samples.push_back(sample);
    }
    return series;
}

OffsetSeries center_series(const OffsetSeries& series, int window_radius) {
    // Accepts raw input and its own centered output (idempotence).
    if (series.stage == SeriesStage::smoothed)
        throw std::invalid_argument("center_series: series already smoothed");

    bool any_valid = false;
    for (const auto& s : series.samples) any_valid |= s.valid;
    if (!any_valid) throw NoValidSamples("center_series: no valid samples");

    OffsetSeries out = series;
    out.stage = SeriesStage::centered;

    if (window_radius <= 0) {
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& s : series.samples)
            if (s.valid) {
                sum += s.vertical_offset;
                ++count;
            }
        const double mean = sum / static_cast<double>(count);
        for (auto& s : out.samples)
            if (s.valid) s.vertical_offset -= mean;
        return out;
    }

    // Sliding mean over valid samples within +-window_radius frames.
    const auto& samples = series.samples;
    std::size_t lo = 0, hi = 0;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const int frame = samples[i].frame_index;
        while (hi < samples.size() && samples[hi].frame_index <= frame + window_radius) {
            if (samples[hi].valid) {
                sum += samples[hi].vertical_offset;
                ++count;
            }
            ++hi;
        }
        while (samples[lo].frame_index < frame - window_radius) {
            if (samples[lo].valid) {
                sum -= samples[lo].vertical_offset;
                --count;
            }
            ++lo;
        }
        if (out.samples[i].valid && count > 0)
            out.samples[i].vertical_offset -= sum / static_cast<double>(count);
    }
    return out;
}

OffsetSeries kalman_smooth(const OffsetSeries& series, const KalmanConfig& cfg) {
    if (series.stage != SeriesStage::centered)
        throw std::invalid_argument("kalman_smooth: expected a centered-stage series");
    if (cfg.lag < 1 || cfg.process_noise <= 0.0 || cfg.measurement_noise <= 0.0)
        throw std::invalid_argument("kalman_smooth: invalid config");

    OffsetSeries out = series;
    out.stage = SeriesStage::smoothed;

    const auto& samples = series.samples;
    const std::size_t n = samples.size();

    std::size_t start = 0;
    while (start < n && !samples[start].valid) ++start;
    if (start == n) return out;  // nothing to estimate; values pass through

    const double r = cfg.measurement_noise;
    const double q = cfg.process_noise;
    const std::size_t m = n - start;

    // Forward pass. Initial state anchors on the first valid measurement so
    // smoothing commutes with constant shifts of the series.
    std::vector<Vec2> x_pred(m), x_filt(m);
    std::vector<Mat2> p_pred(m), p_filt(m), trans(m);

    x_pred[0] = {samples[start].vertical_offset, 0.0};
    p_pred[0] = {r, 0.0, 0.0, 100.0};
    trans[0] = Mat2::identity();

    for (std::size_t i = 0; i < m; ++i) {
        if (i > 0) {
            double dt = samples[start + i].frame_index - samples[start + i - 1].frame_index;
            const Mat2 a = transition(dt);
            trans[i] = a;
            x_pred[i] = a * x_filt[i - 1];
            p_pred[i] = a * p_filt[i - 1] * a.transpose() + process_cov(q, dt);
        }
        if (samples[start + i].valid) {
            const double innovation = samples[start + i].vertical_offset - x_pred[i].p;
            const double s = p_pred[i].a + r;
            const double kp = p_pred[i].a / s;
            const double kv = p_pred[i].c / s;
            x_filt[i] = {x_pred[i].p + kp * innovation, x_pred[i].v + kv * innovation};
            // Joseph-form covariance update keeps the matrix symmetric.
            Mat2 ikh{1.0 - kp, 0.0, -kv, 1.0};
            Mat2 pf = ikh * p_pred[i] * ikh.transpose();
            pf.a += kp * kp * r;
            pf.b += kp * kv * r;
            pf.c += kv * kp * r;
            pf.d += kv * kv * r;
            p_filt[i] = pf;
        } else {
            x_filt[i] = x_pred[i];
            p_filt[i] = p_pred[i];
        }
    }

    // Fixed-lag output: finalize the estimate at i by smoothing backward from
    // the filtered state at i + lag.
    const std::size_t lag = static_cast<std::size_t>(cfg.lag);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t j = std::min(i + lag, m - 1);
        Vec2 xs = x_filt[j];
        for (std::size_t k = j; k-- > i;) {
            const Mat2 gain = p_filt[k] * trans[k + 1].transpose() * p_pred[k + 1].inverse();
            const Vec2 residual{xs.p - x_pred[k + 1].p, xs.v - x_pred[k + 1].v};
            xs = {x_filt[k].p + gain.a * residual.p + gain.b * residual.v,
                  x_filt[k].v + gain.c * residual.p + gain.d * residual.v};
        }
        out.samples[start + i].vertical_offset = xs.p;
    }
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> split_on_gaps(const OffsetSeries& series,
                                                               int max_gap) {
    std::vector<std::pair<std::size_t, std::size_t>> segments;
    const auto& samples = series.samples;

    std::size_t seg_start = 0, seg_end = 0;
    bool open = false;
    std::size_t invalid_run = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!samples[i].valid) {
            ++invalid_run;
            continue;
        }
        if (open && invalid_run > static_cast<std::size_t>(max_gap)) {
            segments.emplace_back(seg_start, seg_end);
            open = false;
        }
        if (!open) {
            seg_start = i;
            open = true;
        }
        seg_end = i;
        invalid_run = 0;
    }
    if (open) segments.emplace_back(seg_start, seg_end);
    return segments;
}

SmoothedSegments smooth_with_gaps(const OffsetSeries& series, const KalmanConfig& cfg,
                                  int max_gap) {
    SmoothedSegments result;
    result.series = series;
    result.series.stage = SeriesStage::smoothed;
    result.segments = split_on_gaps(series, max_gap);

    for (const auto& [first, last] : result.segments) {
        OffsetSeries segment;
        segment.stage = SeriesStage::centered;
        segment.samples.assign(series.samples.begin() + static_cast<std::ptrdiff_t>(first),
                               series.samples.begin() + static_cast<std::ptrdiff_t>(last) + 1);
        auto smoothed = kalman_smooth(segment, cfg);
        for (std::size_t i = 0; i < smoothed.size(); ++i)
            result.series.samples[first + i].vertical_offset =
                smoothed.samples[i].vertical_offset;
    }
    return result;
}

}  // namespace lanetrack
