// Recording ingest: CAN logs, IMU CSV, GPS CSV.
//
// CAN logs are auto-detected line by line in either of two layouts:
//
//   (12.500000) can0 0F1#3C00          candump-compatible, hex ID
//   12.5,241,2,3C00                    CSV: t_s,id_dec,dlc,data_hex
//
// IMU files are CSV with header "t_s,ax,ay,az"; GPS files are CSV with
// header "t_s,vx,vy,vz" plus optional trailing "lat,lon,alt" columns.
// All CSVs use '.' decimal points and accept Unix or Windows line endings.
// Malformed lines are skipped and counted, never silently discarded.
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "canrev/types.hpp"

namespace canrev {

struct IngestReport {
    std::size_t frames_read = 0;
    std::size_t imu_read = 0;
    std::size_t gps_read = 0;
    std::size_t dropped_lines = 0;
    double clock_rebase_offset = 0.0;  // seconds subtracted from every timestamp
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == '\n' || s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

inline std::optional<double> to_double(std::string_view s) {
    if (s.empty()) return std::nullopt;
    char buf[64];
    if (s.size() >= sizeof(buf)) return std::nullopt;
    std::copy(s.begin(), s.end(), buf);
    buf[s.size()] = '\0';
    char* end = nullptr;
    double v = std::strtod(buf, &end);
    if (end != buf + s.size()) return std::nullopt;
    return v;
}

inline std::optional<std::uint64_t> to_uint(std::string_view s, int base = 10) {
    if (s.empty()) return std::nullopt;
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::optional<std::vector<std::uint8_t>> parse_hex_bytes(std::string_view hex) {
    if (hex.size() % 2 != 0 || hex.size() > 16) return std::nullopt;
    std::vector<std::uint8_t> out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto b = to_uint(hex.substr(2 * i, 2), 16);
        if (!b) return std::nullopt;
        out[i] = static_cast<std::uint8_t>(*b);
    }
    return out;
}

// "(12.500000) can0 0F1#3C00" -> frame.  Interface token is ignored.
inline std::optional<CanFrame> parse_candump_line(std::string_view line) {
    if (line.empty() || line.front() != '(') return std::nullopt;
    auto close = line.find(')');
    if (close == std::string_view::npos) return std::nullopt;
    auto t = to_double(line.substr(1, close - 1));
    if (!t || *t < 0.0) return std::nullopt;

    std::string_view rest = trim(line.substr(close + 1));
    auto sp = rest.find(' ');
    if (sp == std::string_view::npos) return std::nullopt;
    std::string_view framepart = trim(rest.substr(sp + 1));
    auto hash = framepart.find('#');
    if (hash == std::string_view::npos) return std::nullopt;

    auto id = to_uint(framepart.substr(0, hash), 16);
    if (!id || *id > kMaxFrameId) return std::nullopt;
    auto payload = parse_hex_bytes(framepart.substr(hash + 1));
    if (!payload) return std::nullopt;

    return CanFrame{*t, static_cast<std::uint32_t>(*id), std::move(*payload)};
}

// "12.5,241,2,3C00" -> frame.  The declared DLC must match the data length.
inline std::optional<CanFrame> parse_can_csv_line(std::string_view line) {
    auto f = split_csv(line);
    if (f.size() != 4) return std::nullopt;
    auto t = to_double(f[0]);
    auto id = to_uint(f[1]);
    auto dlc = to_uint(f[2]);
    if (!t || *t < 0.0 || !id || *id > kMaxFrameId || !dlc || *dlc > 8) return std::nullopt;
    auto payload = parse_hex_bytes(f[3]);
    if (!payload || payload->size() != *dlc) return std::nullopt;
    return CanFrame{*t, static_cast<std::uint32_t>(*id), std::move(*payload)};
}

inline std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return in;
}

inline bool next_line(std::istream& in, std::string& line, bool strip_bom) {
    if (!std::getline(in, line)) return false;
    if (strip_bom && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
        line.erase(0, 3);
    return true;
}

}  // namespace detail

// Reads a CAN log, skipping (and counting) malformed lines. Frames come back
// sorted by timestamp. Every non-empty line either becomes a frame or
// increments dropped.
inline std::vector<CanFrame> read_can_log(const std::string& path, std::size_t* dropped = nullptr) {
    auto in = detail::open_or_throw(path);
    std::vector<CanFrame> frames;
    std::size_t drop = 0;
    std::string line;
    bool first = true;
    while (detail::next_line(in, line, first)) {
        first = false;
        std::string_view l = detail::trim(line);
        if (l.empty()) continue;
        if (auto f = detail::parse_candump_line(l)) {
            frames.push_back(std::move(*f));
        } else if (auto c = detail::parse_can_csv_line(l)) {
            frames.push_back(std::move(*c));
        } else {
            ++drop;
        }
    }
    std::stable_sort(frames.begin(), frames.end(),
                     [](const CanFrame& a, const CanFrame& b) { return a.timestamp < b.timestamp; });
    if (dropped) *dropped += drop;
    return frames;
}

// Reads an IMU CSV. The header must be exactly "t_s,ax,ay,az"; rows with
// non-numeric cells are dropped with a count. Samples come back sorted.
inline std::vector<ImuSample> read_imu_csv(const std::string& path, std::size_t* dropped = nullptr) {
    auto in = detail::open_or_throw(path);
    std::string line;
    if (!detail::next_line(in, line, true))
        throw ParseError("imu file '" + path + "': missing header");
    if (detail::trim(line) != "t_s,ax,ay,az")
        throw ParseError("imu file '" + path + "': expected header 't_s,ax,ay,az'");

    std::vector<ImuSample> samples;
    std::size_t drop = 0;
    while (detail::next_line(in, line, false)) {
        std::string_view l = detail::trim(line);
        if (l.empty()) continue;
        auto f = detail::split_csv(l);
        if (f.size() != 4) { ++drop; continue; }
        auto t = detail::to_double(f[0]);
        auto ax = detail::to_double(f[1]);
        auto ay = detail::to_double(f[2]);
        auto az = detail::to_double(f[3]);
        if (!t || !ax || !ay || !az) { ++drop; continue; }
        samples.push_back({*t, *ax, *ay, *az});
    }
    std::stable_sort(samples.begin(), samples.end(),
                     [](const ImuSample& a, const ImuSample& b) { return a.timestamp < b.timestamp; });
    if (dropped) *dropped += drop;
    return samples;
}

// Reads a GPS CSV. Header "t_s,vx,vy,vz" with optional ",lat,lon,alt".
// Rows may carry 4 or 7 numeric fields; position is kept when present.
inline std::vector<GpsSample> read_gps_csv(const std::string& path, std::size_t* dropped = nullptr) {
    auto in = detail::open_or_throw(path);
    std::string line;
    if (!detail::next_line(in, line, true))
        throw ParseError("gps file '" + path + "': missing header");
    std::string_view header = detail::trim(line);
    if (header != "t_s,vx,vy,vz" && header != "t_s,vx,vy,vz,lat,lon,alt")
        throw ParseError("gps file '" + path + "': expected header 't_s,vx,vy,vz[,lat,lon,alt]'");

    std::vector<GpsSample> samples;
    std::size_t drop = 0;
    while (detail::next_line(in, line, false)) {
        std::string_view l = detail::trim(line);
        if (l.empty()) continue;
        auto f = detail::split_csv(l);
        if (f.size() != 4 && f.size() != 7) { ++drop; continue; }
        GpsSample s;
        auto t = detail::to_double(f[0]);
        auto vx = detail::to_double(f[1]);
        auto vy = detail::to_double(f[2]);
        auto vz = detail::to_double(f[3]);
        if (!t || !vx || !vy || !vz) { ++drop; continue; }
        s.timestamp = *t; s.vx = *vx; s.vy = *vy; s.vz = *vz;
        if (f.size() == 7) {
            auto lat = detail::to_double(f[4]);
            auto lon = detail::to_double(f[5]);
            auto alt = detail::to_double(f[6]);
            if (!lat || !lon || !alt) { ++drop; continue; }
            s.has_position = true;
            s.lat = *lat; s.lon = *lon; s.alt = *alt;
        }
        samples.push_back(s);
    }
    std::stable_sort(samples.begin(), samples.end(),
                     [](const GpsSample& a, const GpsSample& b) { return a.timestamp < b.timestamp; });
    if (dropped) *dropped += drop;
    return samples;
}

struct LoadedRecording {
    Recording recording;
    IngestReport report;
};

// Loads and rebases a full recording. The clock origin becomes the earliest
// timestamp across the three streams; all timestamps are shifted so it is 0.
// gps_required is the caller's masking decision: a drive analyzed with GPS
// masking cannot be loaded without a gps file.
inline LoadedRecording load_recording(const std::string& can_path,
                                      const std::string& imu_path,
                                      const std::optional<std::string>& gps_path,
                                      RecordingKind kind,
                                      bool gps_required = true) {
    if (!gps_path && kind == RecordingKind::drive && gps_required)
        throw AnalysisError("GPS required for drive analysis with masking");

    LoadedRecording out;
    out.recording.kind = kind;
    out.recording.can = read_can_log(can_path, &out.report.dropped_lines);
    out.recording.imu = read_imu_csv(imu_path, &out.report.dropped_lines);
    if (gps_path)
        out.recording.gps = read_gps_csv(*gps_path, &out.report.dropped_lines);

    out.report.frames_read = out.recording.can.size();
    out.report.imu_read = out.recording.imu.size();
    out.report.gps_read = out.recording.gps.size();

    double origin = std::numeric_limits<double>::infinity();
    if (!out.recording.can.empty()) origin = std::min(origin, out.recording.can.front().timestamp);
    if (!out.recording.imu.empty()) origin = std::min(origin, out.recording.imu.front().timestamp);
    if (!out.recording.gps.empty()) origin = std::min(origin, out.recording.gps.front().timestamp);
    if (!std::isfinite(origin)) origin = 0.0;

    if (origin != 0.0) {
        for (auto& f : out.recording.can) f.timestamp -= origin;
        for (auto& s : out.recording.imu) s.timestamp -= origin;
        for (auto& s : out.recording.gps) s.timestamp -= origin;
    }
    out.report.clock_rebase_offset = origin;
    return out;
}

}  // namespace canrev
