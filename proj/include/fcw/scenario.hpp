#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fcw/error.hpp"

namespace fcw {

inline constexpr double kSpeedOfLightMps = 299792458.0;

// Hard sanity bound on vehicle speeds (~216 km/h).
inline constexpr double kMaxSpeedMps = 60.0;

// The four driving events the classifier distinguishes.
enum class EventClass : int {
    NoActivity = 0,
    NoOncomingVehicle = 1,
    VehicleApproaching = 2,
    VehicleDrivingAway = 3,
};

inline constexpr int kNumEventClasses = 4;

inline const char* event_class_name(EventClass c) {
    switch (c) {
        case EventClass::NoActivity: return "no_activity";
        case EventClass::NoOncomingVehicle: return "no_oncoming_vehicle";
        case EventClass::VehicleApproaching: return "vehicle_approaching";
        case EventClass::VehicleDrivingAway: return "vehicle_driving_away";
    }
    return "unknown";
}

inline std::optional<EventClass> event_class_from_name(const std::string& name) {
    for (int i = 0; i < kNumEventClasses; ++i) {
        EventClass c = static_cast<EventClass>(i);
        if (name == event_class_name(c)) return c;
    }
    return std::nullopt;
}

// Along-road kinematic state of one vehicle. The lane offset is a constant
// lateral coordinate; positive speed points in the travel direction of the
// transmitter/receiver pair.
struct VehicleState {
    double position_m = 0.0;
    double lane_offset_m = 0.0;
    double speed_mps = 0.0;
};

// One constant-acceleration piece of a trajectory.
struct TrajectorySegment {
    double duration_s = 0.0;
    double accel_mps2 = 0.0;
};

// Piecewise-constant-acceleration trajectory. After the last segment the
// speed holds constant. An empty segment list is a constant-speed vehicle.
struct Trajectory {
    VehicleState initial;
    std::vector<TrajectorySegment> segments;

    VehicleState state_at(double t) const {
        double pos = initial.position_m;
        double v = initial.speed_mps;
        double remaining = t;
        for (const TrajectorySegment& seg : segments) {
            if (remaining <= 0.0) break;
            double dt = std::min(remaining, seg.duration_s);
            pos += v * dt + 0.5 * seg.accel_mps2 * dt * dt;
            v += seg.accel_mps2 * dt;
            remaining -= dt;
        }
        if (remaining > 0.0) pos += v * remaining;
        return {pos, initial.lane_offset_m, v};
    }

    double speed_at(double t) const { return state_at(t).speed_mps; }
    double position_at(double t) const { return state_at(t).position_m; }

    // |speed| is piecewise linear in t, so checking the segment boundaries
    // covers the extrema.
    double max_abs_speed(double duration_s) const {
        double worst = std::fabs(initial.speed_mps);
        double t = 0.0;
        for (const TrajectorySegment& seg : segments) {
            t = std::min(t + seg.duration_s, duration_s);
            worst = std::max(worst, std::fabs(speed_at(t)));
            if (t >= duration_s) return worst;
        }
        return std::max(worst, std::fabs(speed_at(duration_s)));
    }
};

// Ground-truth description of one recorded event: the transmitter/receiver
// pair, an optional oncoming vehicle, and the probe configuration.
struct ScenarioConfig {
    Trajectory tx;
    Trajectory rx;
    std::optional<Trajectory> oncoming;
    double carrier_frequency_hz = 760e6;
    double duration_s = 0.0;
    double snapshot_period_s = 0.4;
    double tx_rx_gap_m = 150.0;
    EventClass event_class = EventClass::NoActivity;

    bool all_static() const {
        if (tx.initial.speed_mps != 0.0 || !tx.segments.empty()) return false;
        if (rx.initial.speed_mps != 0.0 || !rx.segments.empty()) return false;
        if (oncoming && (oncoming->initial.speed_mps != 0.0 || !oncoming->segments.empty()))
            return false;
        return true;
    }

    void validate() const {
        if (carrier_frequency_hz <= 0.0) throw DomainError("carrier frequency must be positive");
        if (duration_s < 0.0) throw DomainError("duration must be non-negative");
        if (snapshot_period_s <= 0.0) throw DomainError("snapshot period must be positive");
        if (tx.max_abs_speed(duration_s) > kMaxSpeedMps ||
            rx.max_abs_speed(duration_s) > kMaxSpeedMps ||
            (oncoming && oncoming->max_abs_speed(duration_s) > kMaxSpeedMps)) {
            throw DomainError("vehicle speed exceeds the 60 m/s sanity bound");
        }
        bool moving = tx.initial.speed_mps != 0.0 && rx.initial.speed_mps != 0.0;
        if (moving && (tx_rx_gap_m < 100.0 || tx_rx_gap_m > 250.0)) {
            throw DomainError("tx/rx gap must lie in [100, 250] m for moving vehicles");
        }
        if (event_class == EventClass::NoActivity && !all_static()) {
            throw DomainError("no_activity scenarios require all speeds to be zero");
        }
        if ((event_class == EventClass::VehicleApproaching ||
             event_class == EventClass::VehicleDrivingAway) &&
            !oncoming.has_value()) {
            throw DomainError("oncoming vehicle trajectory required for this event class");
        }
    }
};

// Maximum Doppler shift of reflections from static roadside objects; bounds
// the band of NLOS power around the carrier.
inline double max_doppler_shift(double v_t_mps, double v_r_mps, double f_c_hz) {
    if (v_t_mps < 0.0 || v_r_mps < 0.0) throw DomainError("speeds must be non-negative");
    if (f_c_hz <= 0.0) throw DomainError("carrier frequency must be positive");
    return (v_t_mps + v_r_mps) / kSpeedOfLightMps * f_c_hz;
}

namespace detail {

// Range rate of the segment from a to b: projection of the relative velocity
// onto the separation direction. Velocities are along-road only (lane offsets
// are constant).
inline double leg_range_rate(const VehicleState& a, const VehicleState& b) {
    double dx = b.position_m - a.position_m;
    double dy = b.lane_offset_m - a.lane_offset_m;
    double dist = std::sqrt(dx * dx + dy * dy);
    if (dist < 1e-9) return 0.0;
    return dx * (b.speed_mps - a.speed_mps) / dist;
}

}  // namespace detail

// Doppler shift of the two-leg reflection path tx -> oncoming -> rx. Sign
// convention: closing geometry gives positive Hz, so an approaching vehicle
// produces a spike above the static-scatter band.
inline double bistatic_doppler(const ScenarioConfig& scenario, double t) {
    if (!scenario.oncoming) throw DomainError("scenario has no oncoming vehicle");
    if (t < 0.0 || t > scenario.duration_s) throw DomainError("time outside scenario duration");
    VehicleState tx = scenario.tx.state_at(t);
    VehicleState rx = scenario.rx.state_at(t);
    VehicleState on = scenario.oncoming->state_at(t);
    double rate = detail::leg_range_rate(tx, on) + detail::leg_range_rate(on, rx);
    return -rate / kSpeedOfLightMps * scenario.carrier_frequency_hz;
}

enum class SpikeRegion { Approaching, Receding, InBand };

// Position of the reflected spike relative to the static-scatter band edge.
inline SpikeRegion classify_spike_region(double spike_freq_hz, double delta_f_max_hz) {
    if (delta_f_max_hz < 0.0) throw DomainError("band edge must be non-negative");
    if (spike_freq_hz > delta_f_max_hz) return SpikeRegion::Approaching;
    if (spike_freq_hz < -delta_f_max_hz) return SpikeRegion::Receding;
    return SpikeRegion::InBand;
}

// Earliest time at which the oncoming vehicle draws level with the receiver,
// or nullopt when that never happens within the scenario. Positions are
// piecewise quadratic, so a sign-change scan plus bisection is exact enough
// at millisecond resolution.
inline std::optional<double> intersection_time(const ScenarioConfig& scenario) {
    if (!scenario.oncoming) return std::nullopt;
    auto gap = [&](double t) {
        return scenario.oncoming->position_at(t) - scenario.rx.position_at(t);
    };
    const double step = 1e-3;
    double t0 = 0.0;
    double g0 = gap(0.0);
    if (g0 == 0.0) return 0.0;
    while (t0 < scenario.duration_s) {
        double t1 = std::min(t0 + step, scenario.duration_s);
        double g1 = gap(t1);
        if (g1 == 0.0) return t1;
        if ((g0 < 0.0) != (g1 < 0.0)) {
            for (int i = 0; i < 60; ++i) {
                double tm = 0.5 * (t0 + t1);
                double gm = gap(tm);
                if (gm == 0.0) return tm;
                if ((g0 < 0.0) != (gm < 0.0)) {
                    t1 = tm;
                } else {
                    t0 = tm;
                    g0 = gm;
                }
            }
            return 0.5 * (t0 + t1);
        }
        t0 = t1;
        g0 = g1;
    }
    return std::nullopt;
}

// Per-snapshot ground-truth class labels.
//
// An oncoming vehicle that is faster than the receiver keeps its spike above
// +max_doppler_shift for a short stretch after drawing level with it; those
// snapshots map to NoOncomingVehicle so that an "approaching" label never
// survives past the intersection.
inline std::vector<EventClass> ground_truth_labels(const ScenarioConfig& scenario,
                                                   const std::vector<double>& snapshot_times) {
    for (std::size_t i = 1; i < snapshot_times.size(); ++i) {
        if (snapshot_times[i] <= snapshot_times[i - 1]) {
            throw DomainError("snapshot times must be sorted ascending");
        }
    }
    std::optional<double> crossing =
        scenario.oncoming ? intersection_time(scenario) : std::nullopt;
    std::vector<EventClass> labels;
    labels.reserve(snapshot_times.size());
    for (double t : snapshot_times) {
        double v_t = scenario.tx.speed_at(t);
        double v_r = scenario.rx.speed_at(t);
        double v_o = scenario.oncoming ? scenario.oncoming->speed_at(t) : 0.0;
        if (v_t == 0.0 && v_r == 0.0 && v_o == 0.0) {
            labels.push_back(EventClass::NoActivity);
            continue;
        }
        if (!scenario.oncoming) {
            labels.push_back(EventClass::NoOncomingVehicle);
            continue;
        }
        double band = max_doppler_shift(std::fabs(v_t), std::fabs(v_r),
                                        scenario.carrier_frequency_hz);
        SpikeRegion region = classify_spike_region(bistatic_doppler(scenario, t), band);
        switch (region) {
            case SpikeRegion::Approaching:
                if (crossing && t > *crossing) {
                    labels.push_back(EventClass::NoOncomingVehicle);
                } else {
                    labels.push_back(EventClass::VehicleApproaching);
                }
                break;
            case SpikeRegion::Receding:
                labels.push_back(EventClass::VehicleDrivingAway);
                break;
            case SpikeRegion::InBand:
                labels.push_back(EventClass::NoOncomingVehicle);
                break;
        }
    }
    return labels;
}

// Snapshot grid over [0, duration): one timestamp per snapshot period.
inline std::vector<double> snapshot_times(double duration_s, double period_s) {
    if (period_s <= 0.0) throw DomainError("snapshot period must be positive");
    std::size_t n = static_cast<std::size_t>(
        std::max(0.0, std::ceil(duration_s / period_s - 1e-9)));
    std::vector<double> times(n);
    for (std::size_t k = 0; k < n; ++k) times[k] = static_cast<double>(k) * period_s;
    return times;
}

}  // namespace fcw
