#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "fcw/error.hpp"
#include "fcw/rng.hpp"
#include "fcw/scenario.hpp"

namespace fcw {

// Spectrum-analyzer configuration. The two stock profiles mirror the probe
// setups at 760 MHz (1.5 kHz span) and 2.5 GHz (2 kHz span); individual
// fields can be overridden after construction.
struct RadioConfig {
    double center_frequency_hz = 760e6;
    double span_hz = 1.5e3;
    int n_points = 1001;
    double resolution_bandwidth_hz = 10.0;
    double sweep_time_s = 0.40;
    double tx_power_dbm = 20.0;
    double noise_floor_dbm = -110.0;
    double drift_rate_hz_per_min = 0.5;

    static RadioConfig profile_760mhz() { return RadioConfig{}; }

    static RadioConfig profile_2_5ghz() {
        RadioConfig r;
        r.center_frequency_hz = 2.5e9;
        r.span_hz = 2.0e3;
        return r;
    }

    // CI-speed profile: the 2.5 GHz setup on a coarse 129-point grid.
    static RadioConfig profile_reduced() {
        RadioConfig r = profile_2_5ghz();
        r.n_points = 129;
        return r;
    }

    double bin_spacing_hz() const { return span_hz / static_cast<double>(n_points - 1); }
    int center_bin() const { return (n_points - 1) / 2; }

    void validate() const {
        if (n_points < 3 || n_points % 2 == 0) {
            throw DomainError("n_points must be odd and at least 3");
        }
        if (span_hz <= 0.0) throw DomainError("span must be positive");
        if (resolution_bandwidth_hz > span_hz / n_points * 10.0) {
            throw DomainError("resolution bandwidth too wide for the configured grid");
        }
        if (sweep_time_s <= 0.0) throw DomainError("sweep time must be positive");
    }
};

// One analyzer sweep: a uniform frequency grid centered at 0 Hz and the
// received power per bin.
struct Snapshot {
    double timestamp_s = 0.0;
    std::vector<double> freqs_hz;
    std::vector<double> power_dbm;
};

struct Spectrogram {
    RadioConfig radio;
    std::vector<Snapshot> snapshots;
};

// Spectrogram plus its per-snapshot ground-truth class track.
struct LabeledSpectrogram {
    Spectrogram spectrogram;
    std::vector<EventClass> labels;
};

// Power levels of the synthetic spectrum components. Defaults are plausible
// for a 20 dBm probe at highway ranges; the measured levels depend on the
// hardware, so everything is adjustable.
struct SynthLevels {
    double los_dbm = -40.0;
    double nlos_plateau_dbm = -65.0;
    double vehicle_spike_dbm = -75.0;
    double noise_sigma_db = 2.0;
    double ripple_sigma_db = 2.5;
    // Spike kernel width in bins; keeps LOS and vehicle spikes 1-3 bins wide.
    double spike_sigma_bins = 0.8;
};

inline std::vector<double> frequency_grid(const RadioConfig& radio) {
    std::vector<double> freqs(radio.n_points);
    double spacing = radio.bin_spacing_hz();
    for (int i = 0; i < radio.n_points; ++i) {
        freqs[i] = (static_cast<double>(i) - radio.center_bin()) * spacing;
    }
    return freqs;
}

namespace detail {

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

inline void add_spike_mw(std::vector<double>& power_mw, const std::vector<double>& freqs,
                         double center_hz, double peak_dbm, double sigma_hz) {
    double peak_mw = dbm_to_mw(peak_dbm);
    for (std::size_t i = 0; i < power_mw.size(); ++i) {
        double d = (freqs[i] - center_hz) / sigma_hz;
        double w = d * d;
        if (w > 40.0) continue;  // below any representable contribution
        power_mw[i] += peak_mw * std::exp(-0.5 * w);
    }
}

}  // namespace detail

// One synthetic analyzer sweep at time t. Composition, all in linear power:
//   noise floor with per-bin jitter
// + LOS spike (highest power) at the drift offset
// + NLOS plateau with log-normal ripple over [-band, +band] around the drift
// + the oncoming vehicle's reflection spike, when present and out of band
// The slow instrument drift moves every deterministic component by
// drift_rate * t.
inline Snapshot synth_snapshot(const ScenarioConfig& scenario, const RadioConfig& radio,
                               double t, std::uint64_t rng_seed,
                               const SynthLevels& levels = {}) {
    radio.validate();
    if (t < 0.0 || t > scenario.duration_s) throw DomainError("time outside scenario duration");

    Snapshot snap;
    snap.timestamp_s = t;
    snap.freqs_hz = frequency_grid(radio);

    Rng rng(rng_seed);
    std::vector<double> power_mw(radio.n_points, 0.0);

    // Noise floor.
    for (int i = 0; i < radio.n_points; ++i) {
        power_mw[i] = detail::dbm_to_mw(radio.noise_floor_dbm +
                                        rng.normal(0.0, levels.noise_sigma_db));
    }

    double drift_hz = radio.drift_rate_hz_per_min * t / 60.0;
    double spike_sigma_hz = levels.spike_sigma_bins * radio.bin_spacing_hz();

    // NLOS band from static scatterers, bounded by the maximum Doppler shift
    // of the two moving terminals.
    double v_t = std::fabs(scenario.tx.speed_at(t));
    double v_r = std::fabs(scenario.rx.speed_at(t));
    double band_hz = max_doppler_shift(v_t, v_r, scenario.carrier_frequency_hz);
    if (band_hz > 0.0) {
        for (int i = 0; i < radio.n_points; ++i) {
            if (std::fabs(snap.freqs_hz[i] - drift_hz) <= band_hz) {
                power_mw[i] += detail::dbm_to_mw(levels.nlos_plateau_dbm +
                                                 rng.normal(0.0, levels.ripple_sigma_db));
            }
        }
    }

    // Oncoming vehicle reflection; only visible outside the NLOS band.
    if (scenario.oncoming) {
        double spike_hz = bistatic_doppler(scenario, t);
        if (std::fabs(spike_hz) > band_hz) {
            detail::add_spike_mw(power_mw, snap.freqs_hz, spike_hz + drift_hz,
                                 levels.vehicle_spike_dbm, spike_sigma_hz);
        }
    }

    // LOS component, the dominant spike.
    detail::add_spike_mw(power_mw, snap.freqs_hz, drift_hz, levels.los_dbm, spike_sigma_hz);

    snap.power_dbm.resize(radio.n_points);
    for (int i = 0; i < radio.n_points; ++i) {
        snap.power_dbm[i] = detail::mw_to_dbm(power_mw[i]);
    }
    return snap;
}

// Full sweep sequence over the scenario duration plus its label track.
// Per-snapshot RNG streams are derived from (rng_seed, snapshot index), so
// the output is reproducible bit for bit.
inline LabeledSpectrogram synth_spectrogram(const ScenarioConfig& scenario,
                                            const RadioConfig& radio, std::uint64_t rng_seed,
                                            const SynthLevels& levels = {}) {
    scenario.validate();
    radio.validate();
    std::vector<double> times = snapshot_times(scenario.duration_s, scenario.snapshot_period_s);

    LabeledSpectrogram out;
    out.spectrogram.radio = radio;
    out.spectrogram.snapshots.reserve(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        out.spectrogram.snapshots.push_back(
            synth_snapshot(scenario, radio, times[k], derive_seed(rng_seed, k), levels));
    }
    out.labels = ground_truth_labels(scenario, times);
    return out;
}

}  // namespace fcw
