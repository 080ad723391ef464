// Payload tokenization: turning raw frames into candidate channels.
//
// Every frame ID contributes one candidate per payload byte plus one per
// two-byte window, width, and byte order. A window at index i covers
// payload[i] and payload[i+1]; widths run 9..16 bits. MSB channels take the
// top W bits of the big-endian window, LSB channels take the low W bits of
// the little-endian window. Width 16 makes MSB and LSB read the same bytes
// in opposite orders; width 8 windows are just the byte channels, so they
// are not enumerated separately.
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "canrev/types.hpp"

namespace canrev {

// Decodes one channel value from a payload. The payload must be long enough
// for the spec; callers enumerate specs from actual payload lengths so this
// only throws on caller error.
inline std::uint32_t extract_value(const ChannelSpec& spec, const std::vector<std::uint8_t>& payload) {
    validate(spec);
    const auto idx = static_cast<std::size_t>(spec.index);
    if (spec.width_bits == 8) {
        if (idx >= payload.size())
            throw AnalysisError("byte index " + std::to_string(spec.index) + " out of range for payload of " +
                                std::to_string(payload.size()) + " bytes");
        return payload[idx];
    }
    if (idx + 1 >= payload.size())
        throw AnalysisError("window index " + std::to_string(spec.index) + " out of range for payload of " +
                            std::to_string(payload.size()) + " bytes");
    const std::uint32_t hi = payload[idx];
    const std::uint32_t lo = payload[idx + 1];
    if (spec.endianness == Endian::MSB) {
        const std::uint32_t word = (hi << 8) | lo;
        return word >> (16 - spec.width_bits);
    }
    const std::uint32_t word = (lo << 8) | hi;
    return word & ((1u << spec.width_bits) - 1u);
}

// Enumerates every candidate channel for one frame ID and payload length,
// in deterministic order: byte channels by index, then windowed channels by
// ascending width, MSB before LSB, ascending index. A payload of L bytes
// yields L + 16*(L-1) candidates.
inline std::vector<ChannelSpec> enumerate_channels(std::uint32_t frame_id, std::size_t payload_len) {
    std::vector<ChannelSpec> out;
    if (payload_len == 0 || payload_len > 8) return out;
    out.reserve(payload_len + 16 * (payload_len - 1));
    const int len = static_cast<int>(payload_len);
    for (int i = 0; i < len; ++i)
        out.push_back({frame_id, 8, i, Endian::MSB});
    for (int w = 9; w <= 16; ++w)
        for (int e = 0; e < 2; ++e)
            for (int i = 0; i + 1 < len; ++i)
                out.push_back({frame_id, w, i, e == 0 ? Endian::MSB : Endian::LSB});
    return out;
}

// Per-ID summary of what a recording's CAN stream contains. Payload length
// for an ID is the minimum seen, so every enumerated channel is decodable
// from every frame of that ID.
struct FrameIdInfo {
    std::size_t frame_count = 0;
    std::size_t payload_len = 0;
};

inline std::map<std::uint32_t, FrameIdInfo> scan_frame_ids(const std::vector<CanFrame>& frames) {
    std::map<std::uint32_t, FrameIdInfo> out;
    for (const auto& f : frames) {
        auto [it, inserted] = out.try_emplace(f.frame_id, FrameIdInfo{1, f.payload.size()});
        if (!inserted) {
            ++it->second.frame_count;
            it->second.payload_len = std::min(it->second.payload_len, f.payload.size());
        }
    }
    return out;
}

// Enumerates all candidate channels across a CAN stream, grouped by frame ID
// in ascending ID order.
inline std::vector<ChannelSpec> enumerate_all_channels(const std::vector<CanFrame>& frames) {
    std::vector<ChannelSpec> out;
    for (const auto& [id, info] : scan_frame_ids(frames)) {
        auto specs = enumerate_channels(id, info.payload_len);
        out.insert(out.end(), specs.begin(), specs.end());
    }
    return out;
}

// One channel's decoded values in native frame order, with timestamps.
// This is the sequence calibration statistics run on; no resampling.
struct RawChannelTrace {
    ChannelSpec spec;
    std::vector<double> timestamps;
    std::vector<std::uint32_t> values;
};

inline RawChannelTrace decode_trace(const ChannelSpec& spec, const std::vector<CanFrame>& frames) {
    RawChannelTrace trace;
    trace.spec = spec;
    for (const auto& f : frames) {
        if (f.frame_id != spec.frame_id) continue;
        const std::size_t need = static_cast<std::size_t>(spec.index) + (spec.width_bits == 8 ? 1 : 2);
        if (f.payload.size() < need) continue;
        trace.timestamps.push_back(f.timestamp);
        trace.values.push_back(extract_value(spec, f.payload));
    }
    return trace;
}

// Holds a decoded channel onto a uniform grid: each grid point takes the
// value of the latest frame at or before it, and points before the first
// frame are back-filled with the first value. Empty traces produce an empty
// series (values stay empty, first_sample_time is NaN).
inline ChannelSeries resample_trace(const RawChannelTrace& trace, const TimeGrid& grid) {
    ChannelSeries series;
    series.spec = trace.spec;
    series.grid = grid;
    if (trace.values.empty()) {
        series.first_sample_time = std::numeric_limits<double>::quiet_NaN();
        return series;
    }
    series.first_sample_time = trace.timestamps.front();
    series.values.resize(grid.count);
    std::size_t j = 0;
    for (std::size_t i = 0; i < grid.count; ++i) {
        const double t = grid.time(i);
        while (j + 1 < trace.values.size() && trace.timestamps[j + 1] <= t) ++j;
        series.values[i] = trace.timestamps[j] <= t ? trace.values[j] : trace.values.front();
    }
    return series;
}

inline ChannelSeries build_series(const ChannelSpec& spec, const std::vector<CanFrame>& frames,
                                  const TimeGrid& grid) {
    return resample_trace(decode_trace(spec, frames), grid);
}

}  // namespace canrev
