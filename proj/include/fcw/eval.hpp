#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "fcw/error.hpp"
#include "fcw/scenario.hpp"

namespace fcw {

// One-vs-rest confusion tallies for a fixed set of classes.
struct ConfusionCounts {
    std::vector<long> tp, tn, fp, fn;
    long total = 0;

    explicit ConfusionCounts(int n_classes = kNumEventClasses)
        : tp(n_classes, 0), tn(n_classes, 0), fp(n_classes, 0), fn(n_classes, 0) {}

    int n_classes() const { return static_cast<int>(tp.size()); }
};

inline ConfusionCounts confusion(const std::vector<int>& predictions,
                                 const std::vector<int>& truths,
                                 int n_classes = kNumEventClasses) {
    if (predictions.size() != truths.size()) {
        throw DomainError("predictions and truths must have equal length");
    }
    ConfusionCounts counts(n_classes);
    counts.total = static_cast<long>(predictions.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        int p = predictions[i];
        int t = truths[i];
        if (p < 0 || p >= n_classes || t < 0 || t >= n_classes) {
            throw DomainError("label out of range");
        }
        for (int c = 0; c < n_classes; ++c) {
            bool predicted_c = (p == c);
            bool is_c = (t == c);
            if (predicted_c && is_c) ++counts.tp[c];
            else if (predicted_c && !is_c) ++counts.fp[c];
            else if (!predicted_c && is_c) ++counts.fn[c];
            else ++counts.tn[c];
        }
    }
    return counts;
}

// Eqs. for the four one-vs-rest metrics. A zero denominator yields an empty
// optional; reports print it as "undefined" instead of a silent 0 or 1.
inline std::optional<double> accuracy(const ConfusionCounts& c, int cls) {
    double denom = static_cast<double>(c.tp[cls] + c.fp[cls] + c.fn[cls] + c.tn[cls]);
    if (denom == 0.0) return std::nullopt;
    return (c.tp[cls] + c.tn[cls]) / denom;
}

inline std::optional<double> precision(const ConfusionCounts& c, int cls) {
    double denom = static_cast<double>(c.tp[cls] + c.fp[cls]);
    if (denom == 0.0) return std::nullopt;
    return c.tp[cls] / denom;
}

inline std::optional<double> recall(const ConfusionCounts& c, int cls) {
    double denom = static_cast<double>(c.tp[cls] + c.fn[cls]);
    if (denom == 0.0) return std::nullopt;
    return c.tp[cls] / denom;
}

inline std::optional<double> specificity(const ConfusionCounts& c, int cls) {
    double denom = static_cast<double>(c.tn[cls] + c.fp[cls]);
    if (denom == 0.0) return std::nullopt;
    return c.tn[cls] / denom;
}

// Fraction of samples classified correctly: sum of per-class true positives
// over the sample count.
inline double overall_accuracy(const ConfusionCounts& c) {
    if (c.total == 0) return 0.0;
    long correct = std::accumulate(c.tp.begin(), c.tp.end(), 0L);
    return static_cast<double>(correct) / static_cast<double>(c.total);
}

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<double> thresholds;  // descending; rule: score >= threshold
    std::vector<RocPoint> points;    // one per threshold, ending at (1, 1)
    double auc = 0.0;
};

// Threshold sweep over the unique scores, trapezoidal area. Ties are handled
// by grouping equal scores, which makes the area match the pairwise
// Mann-Whitney statistic exactly.
inline RocCurve roc_auc(const std::vector<double>& scores, const std::vector<int>& truths) {
    if (scores.size() != truths.size()) {
        throw DomainError("scores and truths must have equal length");
    }
    long n_pos = 0;
    long n_neg = 0;
    for (int t : truths) {
        if (t != 0 && t != 1) throw DomainError("truths must be 0 or 1");
        if (t == 1) ++n_pos;
        else ++n_neg;
    }
    if (n_pos == 0 || n_neg == 0) {
        throw DomainError("roc needs at least one positive and one negative sample");
    }

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];
    });

    RocCurve curve;
    double area = 0.0;
    long tp = 0, fp = 0;
    double prev_tpr = 0.0, prev_fpr = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        double s = scores[order[i]];
        while (i < order.size() && scores[order[i]] == s) {
            if (truths[order[i]] == 1) ++tp;
            else ++fp;
            ++i;
        }
        double tpr = static_cast<double>(tp) / n_pos;
        double fpr = static_cast<double>(fp) / n_neg;
        area += (fpr - prev_fpr) * (tpr + prev_tpr) * 0.5;
        curve.thresholds.push_back(s);
        curve.points.push_back({fpr, tpr});
        prev_tpr = tpr;
        prev_fpr = fpr;
    }
    curve.auc = area;
    return curve;
}

// Lead-time analysis input: the prediction sequence over one full event,
// aligned with its ground-truth labels.
struct PredictionTrack {
    std::string id;
    std::vector<double> times_s;
    std::vector<EventClass> predicted;
    std::vector<EventClass> truth;
    std::optional<double> intersection_time_s;
};

struct AlertStats {
    std::vector<double> leads_s;
    long misses = 0;
    double mean_s = 0.0;
    double stddev_s = 0.0;
    double max_s = 0.0;
};

// For each track with an approach phase and a known intersection time: lead
// = intersection time minus the timestamp of the first VehicleApproaching
// prediction inside the ground-truth approach span. Undetected events count
// as misses and do not enter the statistics.
inline AlertStats alert_lead_times(const std::vector<PredictionTrack>& tracks) {
    AlertStats stats;
    for (const PredictionTrack& track : tracks) {
        if (track.times_s.size() != track.predicted.size() ||
            track.times_s.size() != track.truth.size()) {
            throw DomainError("track arrays must have equal length");
        }
        if (!track.intersection_time_s) continue;
        bool has_span = false;
        std::optional<double> detection;
        for (std::size_t i = 0; i < track.times_s.size(); ++i) {
            if (track.truth[i] != EventClass::VehicleApproaching) continue;
            has_span = true;
            if (!detection && track.predicted[i] == EventClass::VehicleApproaching) {
                detection = track.times_s[i];
            }
        }
        if (!has_span) continue;
        if (detection) {
            stats.leads_s.push_back(*track.intersection_time_s - *detection);
        } else {
            ++stats.misses;
        }
    }
    if (!stats.leads_s.empty()) {
        double n = static_cast<double>(stats.leads_s.size());
        stats.mean_s = std::accumulate(stats.leads_s.begin(), stats.leads_s.end(), 0.0) / n;
        double var = 0.0;
        for (double lead : stats.leads_s) {
            var += (lead - stats.mean_s) * (lead - stats.mean_s);
        }
        stats.stddev_s = std::sqrt(var / n);
        stats.max_s = *std::max_element(stats.leads_s.begin(), stats.leads_s.end());
    }
    return stats;
}

// ---------------------------------------------------------------------------
// Report output: a metrics table (class, metric, value) and one plot-ready
// ROC point CSV per class, everything at fixed 4-decimal formatting.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_fixed4(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", x);
    return buf;
}

inline std::string format_metric(const std::optional<double>& v) {
    return v ? format_fixed4(*v) : "undefined";
}

}  // namespace detail

inline void write_metrics_csv(std::ostream& os, const ConfusionCounts& counts,
                              const std::vector<std::optional<double>>& aucs) {
    os << "class,metric,value\n";
    for (int c = 0; c < counts.n_classes(); ++c) {
        const char* name = event_class_name(static_cast<EventClass>(c));
        os << name << ",accuracy," << detail::format_metric(accuracy(counts, c)) << "\n";
        os << name << ",precision," << detail::format_metric(precision(counts, c)) << "\n";
        os << name << ",recall," << detail::format_metric(recall(counts, c)) << "\n";
        os << name << ",specificity," << detail::format_metric(specificity(counts, c)) << "\n";
    }
    for (int c = 0; c < counts.n_classes(); ++c) {
        const char* name = event_class_name(static_cast<EventClass>(c));
        os << name << ",auc,"
           << (c < static_cast<int>(aucs.size()) ? detail::format_metric(aucs[c]) : "undefined")
           << "\n";
    }
    os << "overall,accuracy," << detail::format_fixed4(overall_accuracy(counts)) << "\n";
}

inline void write_roc_csv(std::ostream& os, const RocCurve& curve) {
    os << "threshold,fpr,tpr\n";
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        os << detail::format_fixed4(curve.thresholds[i]) << ','
           << detail::format_fixed4(curve.points[i].fpr) << ','
           << detail::format_fixed4(curve.points[i].tpr) << "\n";
    }
}

inline void write_alert_csv(std::ostream& os, const AlertStats& stats) {
    os << "statistic,value\n";
    os << "events_detected," << stats.leads_s.size() << "\n";
    os << "events_missed," << stats.misses << "\n";
    os << "mean_lead_s," << detail::format_fixed4(stats.mean_s) << "\n";
    os << "stddev_lead_s," << detail::format_fixed4(stats.stddev_s) << "\n";
    os << "max_lead_s," << detail::format_fixed4(stats.max_s) << "\n";
}

}  // namespace fcw
