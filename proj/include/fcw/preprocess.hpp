#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "fcw/error.hpp"
#include "fcw/synth.hpp"

namespace fcw {

namespace detail {

inline double median(std::vector<double> v) {
    std::size_t n = v.size();
    std::size_t mid = n / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (n % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
    return 0.5 * (v[mid - 1] + hi);
}

}  // namespace detail

// Noise floor estimate: median power of the outer 10% of bins on each edge
// of the span, where only noise is expected.
inline double estimate_noise_floor(const Snapshot& snapshot) {
    std::size_t n = snapshot.power_dbm.size();
    if (n < 20) throw DomainError("too few bins for a noise floor estimate");
    std::size_t edge = n / 10;
    std::vector<double> outer;
    outer.reserve(2 * edge);
    for (std::size_t i = 0; i < edge; ++i) outer.push_back(snapshot.power_dbm[i]);
    for (std::size_t i = n - edge; i < n; ++i) outer.push_back(snapshot.power_dbm[i]);
    return detail::median(outer);
}

// Clamps every bin below floor + offset to the floor; everything else passes
// through untouched. Applying it twice changes nothing.
inline Spectrogram denoise(const Spectrogram& spectrogram, double threshold_offset_db = 6.0) {
    Spectrogram out = spectrogram;
    for (Snapshot& snap : out.snapshots) {
        double floor = estimate_noise_floor(snap);
        double threshold = floor + threshold_offset_db;
        for (double& p : snap.power_dbm) {
            if (p < threshold) p = floor;
        }
    }
    return out;
}

// Drift-correction output: the recentered spectrogram, the applied circular
// shift per snapshot, and the snapshots whose LOS could not be tracked
// (copied through unshifted).
struct DriftCorrection {
    Spectrogram spectrogram;
    std::vector<int> shifts;
    std::vector<bool> flagged;
};

namespace detail {

inline int median_int(std::vector<int> v) {
    std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    return v[mid];
}

}  // namespace detail

// Tracks the LOS spike (the running argmax within +/- search_halfwidth bins
// of the previous estimate), median-filters the track, and circularly shifts
// each snapshot so the LOS sits at the center bin. A snapshot without a
// dominant spike in the search window is flagged and left unshifted.
inline DriftCorrection correct_drift(const Spectrogram& spectrogram, int search_halfwidth = 5,
                                     int median_window = 5) {
    DriftCorrection out;
    out.spectrogram.radio = spectrogram.radio;
    std::size_t count = spectrogram.snapshots.size();
    out.spectrogram.snapshots.reserve(count);
    out.shifts.resize(count, 0);
    out.flagged.resize(count, false);
    if (count == 0) return out;

    const int n = static_cast<int>(spectrogram.snapshots.front().power_dbm.size());
    const int center = (n - 1) / 2;

    // Raw LOS track.
    std::vector<int> track(count, center);
    int prev = -1;
    for (std::size_t k = 0; k < count; ++k) {
        const std::vector<double>& p = spectrogram.snapshots[k].power_dbm;
        int lo = 0;
        int hi = n - 1;
        if (prev >= 0) {
            lo = std::max(0, prev - search_halfwidth);
            hi = std::min(n - 1, prev + search_halfwidth);
        }
        int best = lo;
        for (int i = lo + 1; i <= hi; ++i) {
            if (p[i] > p[best]) best = i;
        }
        double floor = estimate_noise_floor(spectrogram.snapshots[k]);
        if (p[best] < floor + 15.0) {
            out.flagged[k] = true;
            track[k] = (prev >= 0) ? prev : center;
        } else {
            track[k] = best;
            prev = best;
        }
    }

    // Median filter smooths single-snapshot argmax jitter out of the track.
    std::vector<int> smooth(count);
    int half = median_window / 2;
    for (std::size_t k = 0; k < count; ++k) {
        int lo = std::max<int>(0, static_cast<int>(k) - half);
        int hi = std::min<int>(static_cast<int>(count) - 1, static_cast<int>(k) + half);
        std::vector<int> window(track.begin() + lo, track.begin() + hi + 1);
        smooth[k] = detail::median_int(std::move(window));
    }

    for (std::size_t k = 0; k < count; ++k) {
        const Snapshot& src = spectrogram.snapshots[k];
        Snapshot dst;
        dst.timestamp_s = src.timestamp_s;
        dst.freqs_hz = src.freqs_hz;
        if (out.flagged[k]) {
            dst.power_dbm = src.power_dbm;
        } else {
            int shift = center - smooth[k];
            out.shifts[k] = shift;
            dst.power_dbm.resize(n);
            for (int i = 0; i < n; ++i) {
                int j = ((i - shift) % n + n) % n;
                dst.power_dbm[i] = src.power_dbm[j];
            }
        }
        out.spectrogram.snapshots.push_back(std::move(dst));
    }
    return out;
}

// Keeps only the bins with f_lo <= freq <= f_hi; bin spacing is unchanged.
inline Spectrogram crop_band(const Spectrogram& spectrogram, double f_lo_hz, double f_hi_hz) {
    if (!(f_lo_hz < 0.0 && 0.0 < f_hi_hz)) {
        throw DomainError("crop interval must straddle 0 Hz");
    }
    Spectrogram out;
    out.radio = spectrogram.radio;
    out.snapshots.reserve(spectrogram.snapshots.size());
    std::size_t kept = 0;
    for (const Snapshot& src : spectrogram.snapshots) {
        Snapshot dst;
        dst.timestamp_s = src.timestamp_s;
        for (std::size_t i = 0; i < src.freqs_hz.size(); ++i) {
            if (src.freqs_hz[i] >= f_lo_hz && src.freqs_hz[i] <= f_hi_hz) {
                dst.freqs_hz.push_back(src.freqs_hz[i]);
                dst.power_dbm.push_back(src.power_dbm[i]);
            }
        }
        if (dst.freqs_hz.empty()) throw DomainError("crop interval keeps no bins");
        kept = dst.freqs_hz.size();
        out.snapshots.push_back(std::move(dst));
    }
    if (!out.snapshots.empty()) {
        out.radio.n_points = static_cast<int>(kept);
        out.radio.span_hz = out.snapshots.front().freqs_hz.back() -
                            out.snapshots.front().freqs_hz.front();
    }
    return out;
}

}  // namespace fcw
