#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "fcw/dataset.hpp"
#include "fcw/error.hpp"
#include "fcw/scenario.hpp"

namespace fcw {

// Flat key-value scenario description, one parameter per line:
//
//   event_class = vehicle_approaching
//   duration_s = 24
//   tx_speed_mps = 27.8
//   rx_speed_mps = 27.8
//   tx_rx_gap_m = 150
//   oncoming_start_ahead_m = 900
//   oncoming_speed_mps = -22
//
// '#' starts a comment. The transmitter sits at along-road coordinate 0, the
// receiver tx_rx_gap_m ahead of it, and the oncoming vehicle (enabled by the
// oncoming_* keys) starts oncoming_start_ahead_m ahead of the receiver on
// the adjacent lane. Negative oncoming speed closes on the receiver.
struct ScenarioFileParams {
    EventClass event_class = EventClass::NoActivity;
    double duration_s = 0.0;
    double snapshot_period_s = 0.4;
    double carrier_frequency_hz = 760e6;
    double tx_rx_gap_m = 150.0;
    double tx_speed_mps = 0.0;
    double rx_speed_mps = 0.0;
    double tx_accel_mps2 = 0.0;
    double rx_accel_mps2 = 0.0;
    std::optional<double> tx_accel_duration_s;
    std::optional<double> rx_accel_duration_s;
    bool has_oncoming = false;
    double oncoming_start_ahead_m = 0.0;
    double oncoming_speed_mps = 0.0;
    double oncoming_accel_mps2 = 0.0;
    std::optional<double> oncoming_accel_duration_s;
    double oncoming_lane_offset_m = 3.5;
};

inline ScenarioConfig to_scenario(const ScenarioFileParams& p) {
    auto make_trajectory = [&](double position, double lane, double speed, double accel,
                               const std::optional<double>& accel_duration) {
        Trajectory t;
        t.initial = {position, lane, speed};
        if (accel != 0.0) {
            t.segments.push_back({accel_duration.value_or(p.duration_s), accel});
        }
        return t;
    };

    ScenarioConfig s;
    s.tx = make_trajectory(0.0, 0.0, p.tx_speed_mps, p.tx_accel_mps2, p.tx_accel_duration_s);
    s.rx = make_trajectory(p.tx_rx_gap_m, 0.0, p.rx_speed_mps, p.rx_accel_mps2,
                           p.rx_accel_duration_s);
    if (p.has_oncoming) {
        s.oncoming = make_trajectory(p.tx_rx_gap_m + p.oncoming_start_ahead_m,
                                     p.oncoming_lane_offset_m, p.oncoming_speed_mps,
                                     p.oncoming_accel_mps2, p.oncoming_accel_duration_s);
    }
    s.carrier_frequency_hz = p.carrier_frequency_hz;
    s.duration_s = p.duration_s;
    s.snapshot_period_s = p.snapshot_period_s;
    s.tx_rx_gap_m = p.tx_rx_gap_m;
    s.event_class = p.event_class;
    s.validate();
    return s;
}

inline ScenarioFileParams parse_scenario_file(std::istream& is) {
    ScenarioFileParams p;
    bool have_event = false;
    bool have_duration = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string key, value;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::stringstream ss(line);
            std::string token;
            if (!(ss >> token)) continue;  // blank line
            throw ParseError(line_no, "expected 'key = value'");
        }
        auto trim = [](std::string s) {
            std::size_t a = s.find_first_not_of(" \t\r");
            std::size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        key = trim(line.substr(0, eq));
        value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw ParseError(line_no, "expected 'key = value'");

        auto num = [&]() { return detail::parse_double(value, line_no); };
        if (key == "event_class") {
            auto cls = event_class_from_name(value);
            if (!cls) throw ParseError(line_no, "unknown class name '" + value + "'");
            p.event_class = *cls;
            have_event = true;
        } else if (key == "duration_s") {
            p.duration_s = num();
            have_duration = true;
        } else if (key == "snapshot_period_s") {
            p.snapshot_period_s = num();
        } else if (key == "carrier_frequency_hz") {
            p.carrier_frequency_hz = num();
        } else if (key == "tx_rx_gap_m") {
            p.tx_rx_gap_m = num();
        } else if (key == "tx_speed_mps") {
            p.tx_speed_mps = num();
        } else if (key == "rx_speed_mps") {
            p.rx_speed_mps = num();
        } else if (key == "tx_accel_mps2") {
            p.tx_accel_mps2 = num();
        } else if (key == "rx_accel_mps2") {
            p.rx_accel_mps2 = num();
        } else if (key == "tx_accel_duration_s") {
            p.tx_accel_duration_s = num();
        } else if (key == "rx_accel_duration_s") {
            p.rx_accel_duration_s = num();
        } else if (key == "oncoming_start_ahead_m") {
            p.oncoming_start_ahead_m = num();
            p.has_oncoming = true;
        } else if (key == "oncoming_speed_mps") {
            p.oncoming_speed_mps = num();
            p.has_oncoming = true;
        } else if (key == "oncoming_accel_mps2") {
            p.oncoming_accel_mps2 = num();
        } else if (key == "oncoming_accel_duration_s") {
            p.oncoming_accel_duration_s = num();
        } else if (key == "oncoming_lane_offset_m") {
            p.oncoming_lane_offset_m = num();
        } else {
            throw ParseError(line_no, "unknown key '" + key + "'");
        }
    }
    if (!have_event) throw ParseError(line_no, "missing required key 'event_class'");
    if (!have_duration) throw ParseError(line_no, "missing required key 'duration_s'");
    return p;
}

inline ScenarioFileParams parse_scenario_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DomainError("cannot open '" + path + "' for reading");
    return parse_scenario_file(is);
}

inline void write_scenario_file(std::ostream& os, const ScenarioFileParams& p) {
    os << "event_class = " << event_class_name(p.event_class) << "\n";
    os << "duration_s = " << detail::format_fixed6(p.duration_s) << "\n";
    os << "snapshot_period_s = " << detail::format_fixed6(p.snapshot_period_s) << "\n";
    os << "carrier_frequency_hz = " << detail::format_fixed6(p.carrier_frequency_hz) << "\n";
    os << "tx_rx_gap_m = " << detail::format_fixed6(p.tx_rx_gap_m) << "\n";
    os << "tx_speed_mps = " << detail::format_fixed6(p.tx_speed_mps) << "\n";
    os << "rx_speed_mps = " << detail::format_fixed6(p.rx_speed_mps) << "\n";
    if (p.tx_accel_mps2 != 0.0) {
        os << "tx_accel_mps2 = " << detail::format_fixed6(p.tx_accel_mps2) << "\n";
        if (p.tx_accel_duration_s) {
            os << "tx_accel_duration_s = " << detail::format_fixed6(*p.tx_accel_duration_s)
               << "\n";
        }
    }
    if (p.rx_accel_mps2 != 0.0) {
        os << "rx_accel_mps2 = " << detail::format_fixed6(p.rx_accel_mps2) << "\n";
        if (p.rx_accel_duration_s) {
            os << "rx_accel_duration_s = " << detail::format_fixed6(*p.rx_accel_duration_s)
               << "\n";
        }
    }
    if (p.has_oncoming) {
        os << "oncoming_start_ahead_m = " << detail::format_fixed6(p.oncoming_start_ahead_m)
           << "\n";
        os << "oncoming_speed_mps = " << detail::format_fixed6(p.oncoming_speed_mps) << "\n";
        if (p.oncoming_accel_mps2 != 0.0) {
            os << "oncoming_accel_mps2 = " << detail::format_fixed6(p.oncoming_accel_mps2)
               << "\n";
            if (p.oncoming_accel_duration_s) {
                os << "oncoming_accel_duration_s = "
                   << detail::format_fixed6(*p.oncoming_accel_duration_s) << "\n";
            }
        }
        os << "oncoming_lane_offset_m = " << detail::format_fixed6(p.oncoming_lane_offset_m)
           << "\n";
    }
}

inline void write_scenario_file(const std::string& path, const ScenarioFileParams& p) {
    std::ofstream os(path);
    if (!os) throw DomainError("cannot open '" + path + "' for writing");
    write_scenario_file(os, p);
}

}  // namespace fcw
