// Report serialization. CSV mirrors the table layout of bench reports:
//
//   correlation:  ID,Channel,Correlation
//   discovery:    ID,Channel,Correlation,Range,Unique,StDev,Smooth
//
// Correlations print with 8 decimals, StDev as a rounded integer, Smooth as
// the integer display value. The JSON variants carry full-precision values
// plus the flags the CSV cannot: masking_used, steering direction, and the
// undefined-correlation marker. CSV readers reconstruct rows at printed
// precision so reports round-trip.
#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "canrev/ingest.hpp"
#include "canrev/naming.hpp"
#include "canrev/pipeline.hpp"
#include "canrev/types.hpp"

namespace canrev {

inline const char* action_name(Action a) {
    switch (a) {
        case Action::decelerate: return "decelerate";
        case Action::accelerate: return "accelerate";
        case Action::steer_left: return "steer_left";
        case Action::steer_right: return "steer_right";
        case Action::steer: return "steer";
    }
    return "decelerate";
}

inline Action parse_action(const std::string& s) {
    if (s == "decelerate") return Action::decelerate;
    if (s == "accelerate") return Action::accelerate;
    if (s == "steer_left") return Action::steer_left;
    if (s == "steer_right") return Action::steer_right;
    if (s == "steer") return Action::steer;
    throw ParseError("unknown action '" + s +
                     "' (expected decelerate, accelerate, steer, steer_left, or steer_right)");
}

inline const char* direction_name(SteerDirection d) {
    switch (d) {
        case SteerDirection::none: return "none";
        case SteerDirection::left: return "left";
        case SteerDirection::right: return "right";
        case SteerDirection::magnitude: return "magnitude";
    }
    return "none";
}

namespace detail {

inline std::string fixed8(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.8f", v);
    return buf;
}

inline std::string full_precision(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

inline void write_correlation_csv(std::ostream& os, const CorrelationTable& table) {
    os << "ID,Channel,Correlation\n";
    for (const auto& row : table.rows)
        os << row.spec.frame_id << ',' << field_name(row.spec) << ','
           << detail::fixed8(row.correlation) << '\n';
}

inline void write_correlation_json(std::ostream& os, const CorrelationTable& table) {
    os << "{\n"
       << "  \"action\": \"" << action_name(table.action) << "\",\n"
       << "  \"masking_used\": " << (table.masking_used ? "true" : "false") << ",\n"
       << "  \"top_n\": " << table.top_n << ",\n"
       << "  \"rows\": [";
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        os << (i ? ",\n    " : "\n    ") << "{\"id\": " << row.spec.frame_id << ", \"channel\": \""
           << field_name(row.spec) << "\", \"correlation\": " << detail::full_precision(row.correlation)
           << ", \"direction\": \"" << direction_name(row.direction) << "\", \"undefined\": "
           << (row.undefined ? "true" : "false") << "}";
    }
    os << (table.rows.empty() ? "]\n" : "\n  ]\n") << "}\n";
}

inline void write_discovery_csv(std::ostream& os, const std::vector<DiscoveryRow>& rows) {
    os << "ID,Channel,Correlation,Range,Unique,StDev,Smooth\n";
    for (const auto& row : rows)
        os << row.spec.frame_id << ',' << field_name(row.spec) << ','
           << detail::fixed8(row.correlation) << ',' << row.range << ',' << row.unique << ','
           << std::llround(row.stdev_deriv) << ',' << row.smooth_display << '\n';
}

inline void write_discovery_json(std::ostream& os, Action action, bool masking_used,
                                 const std::vector<DiscoveryRow>& rows) {
    os << "{\n"
       << "  \"action\": \"" << action_name(action) << "\",\n"
       << "  \"masking_used\": " << (masking_used ? "true" : "false") << ",\n"
       << "  \"rows\": [";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        os << (i ? ",\n    " : "\n    ") << "{\"id\": " << row.spec.frame_id << ", \"channel\": \""
           << field_name(row.spec) << "\", \"correlation\": " << detail::full_precision(row.correlation)
           << ", \"range\": " << row.range << ", \"unique\": " << row.unique
           << ", \"stdev\": " << detail::full_precision(row.stdev_deriv)
           << ", \"smooth\": " << detail::full_precision(row.smooth)
           << ", \"smooth_display\": " << row.smooth_display << ", \"direction\": \""
           << direction_name(row.direction) << "\"}";
    }
    os << (rows.empty() ? "]\n" : "\n  ]\n") << "}\n";
}

// CSV readers: inverse of the writers at printed precision. Fields the CSV
// does not carry (direction, undefined, full-precision smooth) come back at
// their defaults; stdev_deriv holds the printed integer.

inline std::vector<CorrelationRow> read_correlation_csv(const std::string& path) {
    auto in = detail::open_or_throw(path);
    std::string line;
    if (!detail::next_line(in, line, true) || detail::trim(line) != "ID,Channel,Correlation")
        throw ParseError("report '" + path + "': expected header 'ID,Channel,Correlation'");
    std::vector<CorrelationRow> rows;
    std::size_t lineno = 1;
    while (detail::next_line(in, line, false)) {
        ++lineno;
        std::string_view l = detail::trim(line);
        if (l.empty()) continue;
        auto f = detail::split_csv(l);
        if (f.size() != 3)
            throw ParseError("report '" + path + "' line " + std::to_string(lineno) + ": expected 3 fields");
        CorrelationRow row;
        row.spec = parse_channel_name(std::string(f[0]) + "_" + std::string(f[1]));
        auto corr = detail::to_double(f[2]);
        if (!corr)
            throw ParseError("report '" + path + "' line " + std::to_string(lineno) + ": bad correlation");
        row.correlation = *corr;
        rows.push_back(row);
    }
    return rows;
}

inline std::vector<DiscoveryRow> read_discovery_csv(const std::string& path) {
    auto in = detail::open_or_throw(path);
    std::string line;
    if (!detail::next_line(in, line, true) ||
        detail::trim(line) != "ID,Channel,Correlation,Range,Unique,StDev,Smooth")
        throw ParseError("report '" + path +
                         "': expected header 'ID,Channel,Correlation,Range,Unique,StDev,Smooth'");
    std::vector<DiscoveryRow> rows;
    std::size_t lineno = 1;
    while (detail::next_line(in, line, false)) {
        ++lineno;
        std::string_view l = detail::trim(line);
        if (l.empty()) continue;
        auto f = detail::split_csv(l);
        if (f.size() != 7)
            throw ParseError("report '" + path + "' line " + std::to_string(lineno) + ": expected 7 fields");
        DiscoveryRow row;
        row.spec = parse_channel_name(std::string(f[0]) + "_" + std::string(f[1]));
        const auto corr = detail::to_double(f[2]);
        const auto range = detail::to_uint(f[3]);
        const auto unique = detail::to_uint(f[4]);
        const auto stdev = detail::to_uint(f[5]);
        const auto smooth = detail::to_uint(f[6]);
        if (!corr || !range || !unique || !stdev || !smooth)
            throw ParseError("report '" + path + "' line " + std::to_string(lineno) + ": bad numeric field");
        row.correlation = *corr;
        row.range = static_cast<std::uint32_t>(*range);
        row.unique = *unique;
        row.stdev_deriv = static_cast<double>(*stdev);
        row.smooth_display = static_cast<int>(*smooth);
        row.smooth = static_cast<double>(*smooth);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace canrev
