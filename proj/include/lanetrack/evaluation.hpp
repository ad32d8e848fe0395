// Mask-level metrics (IoU and the mean-over-thresholds TP/(TP+FP+FN) score)
// and event-level confusion counts with sensitivity.
//
// Note: map_score() is the Jaccard-style average the source metric defines -
// per IoU threshold t, score = TP(t) / (TP(t) + FP(t) + FN(t)), averaged over
// thresholds. It is not the COCO ranked average precision.

#pragma once

#include <map>
#include <vector>

#include "lanetrack/classifier.hpp"
#include "lanetrack/mask_io.hpp"

namespace lanetrack {

struct ConfusionCounts {
    long long tp = 0;
    long long fp = 0;
    long long fn = 0;
    long long tn = 0;  // tracked per clip-segment, excluded from sensitivity

    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        tn += o.tn;
        return *this;
    }
};

struct EvalConfig {
    std::vector<double> iou_thresholds = {0.5};
    int event_match_window = 50;  // frames
};

// |A intersect B| / |A union B| over lane-pixel sets. Both masks empty -> 1,
// exactly one empty -> 0. Throws DimensionMismatch.
double iou(const Mask& a, const Mask& b);

// Per-frame, per-threshold counting:
//   both nonempty and IoU >= t  -> TP
//   both nonempty and IoU <  t  -> FP and FN (additive denominator)
//   prediction nonempty, truth empty -> FP
//   prediction empty, truth nonempty -> FN
// Score per threshold is TP/(TP+FP+FN); the result averages over thresholds.
// A threshold with no counted objects at all scores 1 (vacuously perfect).
// Throws FrameMismatch when frame indices or counts disagree.
double map_score(const std::vector<Mask>& predictions, const std::vector<Mask>& truths,
                 const EvalConfig& cfg);

// Per-threshold counts backing map_score, for reporting.
std::vector<ConfusionCounts> mask_confusion(const std::vector<Mask>& predictions,
                                            const std::vector<Mask>& truths,
                                            const EvalConfig& cfg);

// Event matching key: events only ever match within the same kind+direction.
struct EventKey {
    EventKind kind;
    Direction direction;
    bool operator<(const EventKey& o) const {
        return kind != o.kind ? kind < o.kind : direction < o.direction;
    }
};

// Greedy one-to-one matching per (kind, direction): a prediction is TP when
// an unmatched truth event of the same key lies within event_match_window
// frames (nearest first); unmatched predictions are FP, unmatched truths FN.
// A key with neither predictions nor truths in either list contributes
// nothing; tn = 1 on every key only when both whole lists are empty.
std::map<EventKey, ConfusionCounts> match_events(const std::vector<LaneEvent>& predicted,
                                                 const std::vector<LaneEvent>& truth,
                                                 const EvalConfig& cfg);

// tp / (tp + fn). Throws UndefinedMetric when tp + fn = 0.
double sensitivity(const ConfusionCounts& counts);

}  // namespace lanetrack
