#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fcw/error.hpp"
#include "fcw/rng.hpp"
#include "fcw/synth.hpp"

namespace fcw {

// A classifier input: time_step consecutive snapshots of n_features power
// values (row-major, one row per snapshot), labeled by the class of its last
// snapshot. origin_id plus start_index tie the window back to its source
// spectrogram; time_s is the timestamp of the last snapshot, i.e. the moment
// a warning based on this window would fire.
struct LabeledWindow {
    std::vector<double> features;
    std::size_t time_step = 1;
    std::size_t n_features = 0;
    EventClass label = EventClass::NoActivity;
    std::string origin_id;
    std::size_t start_index = 0;
    double time_s = 0.0;
};

// Global min-max feature scaling, fitted on the training split.
struct Normalization {
    double min = 0.0;
    double max = 1.0;

    double apply(double x, bool clamp) const {
        double range = max - min;
        double y = range > 0.0 ? (x - min) / range : 0.0;
        if (clamp) y = std::clamp(y, 0.0, 1.0);
        return y;
    }
};

struct SplitDataset {
    std::vector<LabeledWindow> train;
    std::vector<LabeledWindow> test;
    std::uint64_t split_seed = 0;
    Normalization normalization;
};

// Cuts a labeled spectrogram into non-overlapping windows of time_step
// snapshots. Overlap is avoided so that a later train/test split cannot leak
// snapshots across the boundary. Features stay in raw dBm; split() owns the
// normalization.
inline std::vector<LabeledWindow> window(const Spectrogram& spectrogram,
                                         const std::vector<EventClass>& labels,
                                         std::size_t time_step,
                                         const std::string& origin_id = "") {
    if (time_step < 1) throw DomainError("time_step must be at least 1");
    if (labels.size() != spectrogram.snapshots.size()) {
        throw DomainError("label track length does not match snapshot count");
    }
    std::vector<LabeledWindow> windows;
    std::size_t count = spectrogram.snapshots.size() / time_step;
    windows.reserve(count);
    for (std::size_t w = 0; w < count; ++w) {
        std::size_t start = w * time_step;
        std::size_t last = start + time_step - 1;
        LabeledWindow win;
        win.time_step = time_step;
        win.n_features = spectrogram.snapshots[start].power_dbm.size();
        win.features.reserve(time_step * win.n_features);
        for (std::size_t k = start; k <= last; ++k) {
            const std::vector<double>& p = spectrogram.snapshots[k].power_dbm;
            if (p.size() != win.n_features) {
                throw DomainError("snapshots in one window must have equal bin counts");
            }
            win.features.insert(win.features.end(), p.begin(), p.end());
        }
        win.label = labels[last];
        win.origin_id = origin_id;
        win.start_index = start;
        win.time_s = spectrogram.snapshots[last].timestamp_s;
        windows.push_back(std::move(win));
    }
    return windows;
}

inline std::vector<LabeledWindow> window(const LabeledSpectrogram& labeled,
                                         std::size_t time_step,
                                         const std::string& origin_id = "") {
    return window(labeled.spectrogram, labeled.labels, time_step, origin_id);
}

// Seeded random permutation, first floor(fraction * n) windows to train.
// Min-max scaling is fitted on the training split only and applied to both;
// test values outside the training range are clamped into [0, 1].
inline SplitDataset split(std::vector<LabeledWindow> windows, double fraction,
                          std::uint64_t seed) {
    if (windows.size() < 5) throw DomainError("need at least 5 windows to split");
    if (fraction <= 0.0 || fraction >= 1.0) throw DomainError("fraction must be in (0, 1)");

    Rng rng(seed);
    for (std::size_t i = windows.size() - 1; i > 0; --i) {
        std::size_t j = static_cast<std::size_t>(rng.uniform_index(i + 1));
        std::swap(windows[i], windows[j]);
    }

    std::size_t n_train = static_cast<std::size_t>(
        std::floor(fraction * static_cast<double>(windows.size())));

    SplitDataset out;
    out.split_seed = seed;
    out.train.assign(windows.begin(), windows.begin() + n_train);
    out.test.assign(windows.begin() + n_train, windows.end());

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const LabeledWindow& w : out.train) {
        for (double x : w.features) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    }
    out.normalization = {lo, hi};
    for (LabeledWindow& w : out.train) {
        for (double& x : w.features) x = out.normalization.apply(x, false);
    }
    for (LabeledWindow& w : out.test) {
        for (double& x : w.features) x = out.normalization.apply(x, true);
    }
    return out;
}

// ---------------------------------------------------------------------------
// On-disk spectrogram format
//
// Text header of key=value lines (version, center_frequency_hz, span_hz,
// n_points, sweep_time_s) followed by one comma-separated row per snapshot:
// timestamp, class name, then n_points power values in dBm. Fixed 6-decimal
// formatting keeps rewrites byte-identical.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_fixed6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", x);
    return buf;
}

inline double parse_double(const std::string& text, std::size_t line) {
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0') {
        throw ParseError(line, "expected a number, found '" + text + "'");
    }
    return v;
}

}  // namespace detail

inline void write_spectrogram(std::ostream& os, const Spectrogram& spectrogram,
                              const std::vector<EventClass>& labels) {
    if (labels.size() != spectrogram.snapshots.size()) {
        throw DomainError("label track length does not match snapshot count");
    }
    const RadioConfig& r = spectrogram.radio;
    os << "version=1\n";
    os << "center_frequency_hz=" << detail::format_fixed6(r.center_frequency_hz) << "\n";
    os << "span_hz=" << detail::format_fixed6(r.span_hz) << "\n";
    os << "n_points=" << r.n_points << "\n";
    os << "sweep_time_s=" << detail::format_fixed6(r.sweep_time_s) << "\n";
    for (std::size_t k = 0; k < spectrogram.snapshots.size(); ++k) {
        const Snapshot& snap = spectrogram.snapshots[k];
        if (static_cast<int>(snap.power_dbm.size()) != r.n_points) {
            throw DomainError("snapshot bin count does not match n_points");
        }
        os << detail::format_fixed6(snap.timestamp_s) << ',' << event_class_name(labels[k]);
        for (double p : snap.power_dbm) os << ',' << detail::format_fixed6(p);
        os << '\n';
    }
}

inline void write_spectrogram(const std::string& path, const Spectrogram& spectrogram,
                              const std::vector<EventClass>& labels) {
    std::ofstream os(path);
    if (!os) throw DomainError("cannot open '" + path + "' for writing");
    write_spectrogram(os, spectrogram, labels);
}

inline LabeledSpectrogram read_spectrogram(std::istream& is) {
    LabeledSpectrogram out;
    RadioConfig& r = out.spectrogram.radio;
    std::string line;
    std::size_t line_no = 0;

    const char* keys[5] = {"version", "center_frequency_hz", "span_hz", "n_points",
                           "sweep_time_s"};
    double values[5] = {0, 0, 0, 0, 0};
    for (int k = 0; k < 5; ++k) {
        if (!std::getline(is, line)) throw ParseError(line_no + 1, "missing header line");
        ++line_no;
        std::string want = std::string(keys[k]) + "=";
        if (line.rfind(want, 0) != 0) {
            throw ParseError(line_no, "expected header key '" + std::string(keys[k]) + "'");
        }
        values[k] = detail::parse_double(line.substr(want.size()), line_no);
    }
    if (values[0] != 1.0) throw ParseError(1, "unsupported format version");
    r.center_frequency_hz = values[1];
    r.span_hz = values[2];
    r.n_points = static_cast<int>(values[3]);
    r.sweep_time_s = values[4];
    if (r.n_points < 1 || values[3] != std::floor(values[3])) {
        throw ParseError(4, "n_points must be a positive integer");
    }
    if (r.span_hz <= 0.0) throw ParseError(3, "span must be positive");

    std::vector<double> freqs(r.n_points);
    double spacing = r.n_points > 1 ? r.span_hz / (r.n_points - 1) : 0.0;
    for (int i = 0; i < r.n_points; ++i) {
        freqs[i] = (static_cast<double>(i) - (r.n_points - 1) / 2) * spacing;
    }

    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        if (!std::getline(ss, cell, ',')) throw ParseError(line_no, "empty snapshot row");
        Snapshot snap;
        snap.timestamp_s = detail::parse_double(cell, line_no);
        if (!std::getline(ss, cell, ',')) throw ParseError(line_no, "missing class name");
        auto label = event_class_from_name(cell);
        if (!label) throw ParseError(line_no, "unknown class name '" + cell + "'");
        snap.power_dbm.reserve(r.n_points);
        while (std::getline(ss, cell, ',')) {
            snap.power_dbm.push_back(detail::parse_double(cell, line_no));
        }
        if (static_cast<int>(snap.power_dbm.size()) != r.n_points) {
            throw ParseError(line_no, "expected " + std::to_string(r.n_points) +
                                          " power values, found " +
                                          std::to_string(snap.power_dbm.size()));
        }
        snap.freqs_hz = freqs;
        out.spectrogram.snapshots.push_back(std::move(snap));
        out.labels.push_back(*label);
    }
    return out;
}

inline LabeledSpectrogram read_spectrogram(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DomainError("cannot open '" + path + "' for reading");
    return read_spectrogram(is);
}

}  // namespace fcw
