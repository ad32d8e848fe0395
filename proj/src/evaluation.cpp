#include "lanetrack/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace lanetrack {

double iou(const Mask& a, const Mask& b) {
    if (a.width != b.width || a.height != b.height)
        throw DimensionMismatch("iou: mask dimensions differ");

    std::size_t intersection = 0, uni = 0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        bool pa = a.pixels[i] != 0, pb = b.pixels[i] != 0;
        intersection += pa && pb;
        uni += pa || pb;
    }
    if (uni == 0) return 1.0;  // both empty
    return static_cast<double>(intersection) / static_cast<double>(uni);
}

namespace {

void check_thresholds(const std::vector<double>& thresholds) {
    if (thresholds.empty())
        throw std::invalid_argument("eval config: need at least one IoU threshold");
    double prev = 0.0;
    for (double t : thresholds) {
        if (t <= prev || t > 1.0)
            throw std::invalid_argument(
                "eval config: thresholds must be unique, ascending, in (0,1]");
        prev = t;
    }
}

}  // namespace

std::vector<ConfusionCounts> mask_confusion(const std::vector<Mask>& predictions,
                                            const std::vector<Mask>& truths,
                                            const EvalConfig& cfg) {
    check_thresholds(cfg.iou_thresholds);
    if (predictions.size() != truths.size())
        throw FrameMismatch("mask_confusion: prediction/truth counts differ");
    for (std::size_t i = 0; i < predictions.size(); ++i)
        if (predictions[i].frame_index != truths[i].frame_index)
            throw FrameMismatch("mask_confusion: frame indices differ at position " +
                                std::to_string(i));

    std::vector<ConfusionCounts> out(cfg.iou_thresholds.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const bool pred_empty = predictions[i].empty_lane();
        const bool truth_empty = truths[i].empty_lane();
        if (pred_empty && truth_empty) {
            for (auto& counts : out) ++counts.tn;
            continue;
        }
        if (pred_empty) {
            for (auto& counts : out) ++counts.fn;
            continue;
        }
        if (truth_empty) {
            for (auto& counts : out) ++counts.fp;
            continue;
        }
        const double overlap = iou(predictions[i], truths[i]);
        for (std::size_t t = 0; t < cfg.iou_thresholds.size(); ++t) {
            if (overlap >= cfg.iou_thresholds[t]) {
                ++out[t].tp;
            } else {
                // An IoU miss leaves both an unexplained prediction and an
                // unexplained truth object, so it counts on both sides of the
                // additive denominator.
                ++out[t].fp;
                ++out[t].fn;
            }
        }
    }
    return out;
}

double map_score(const std::vector<Mask>& predictions, const std::vector<Mask>& truths,
                 const EvalConfig& cfg) {
    auto per_threshold = mask_confusion(predictions, truths, cfg);
    double sum = 0.0;
    for (const auto& counts : per_threshold) {
        const long long denom = counts.tp + counts.fp + counts.fn;
        sum += denom == 0 ? 1.0 : static_cast<double>(counts.tp) / static_cast<double>(denom);
    }
    return sum / static_cast<double>(per_threshold.size());
}

std::map<EventKey, ConfusionCounts> match_events(const std::vector<LaneEvent>& predicted,
                                                 const std::vector<LaneEvent>& truth,
                                                 const EvalConfig& cfg) {
    std::map<EventKey, ConfusionCounts> out;

    std::vector<bool> truth_used(truth.size(), false);
    for (const auto& pred : predicted) {
        const EventKey key{pred.kind, pred.direction};
        std::size_t best = truth.size();
        int best_dist = cfg.event_match_window + 1;
        for (std::size_t j = 0; j < truth.size(); ++j) {
            if (truth_used[j] || truth[j].kind != pred.kind ||
                truth[j].direction != pred.direction)
                continue;
            int dist = std::abs(truth[j].frame_index - pred.frame_index);
            if (dist <= cfg.event_match_window && dist < best_dist) {
                best = j;
                best_dist = dist;
            }
        }
        if (best != truth.size()) {
            truth_used[best] = true;
            ++out[key].tp;
        } else {
            ++out[key].fp;
        }
    }
    for (std::size_t j = 0; j < truth.size(); ++j)
        if (!truth_used[j]) ++out[{truth[j].kind, truth[j].direction}].fn;

    if (predicted.empty() && truth.empty()) {
        // Vehicle stayed in lane and the algorithm stayed silent: record the
        // true negative per direction. Excluded from sensitivity.
        for (Direction d : {Direction::left, Direction::right})
            for (EventKind k : {EventKind::change, EventKind::incursion})
                out[{k, d}].tn = 1;
    }
    return out;
}

double sensitivity(const ConfusionCounts& counts) {
    const long long denom = counts.tp + counts.fn;
    if (denom == 0) throw UndefinedMetric("sensitivity: tp + fn = 0");
    return static_cast<double>(counts.tp) / static_cast<double>(denom);
}

}  // namespace lanetrack
