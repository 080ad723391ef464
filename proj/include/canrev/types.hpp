// Core domain types shared across the library. Plain value types, no I/O.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace canrev {

// Base class for everything this library throws.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unreadable or unwritable files.
struct IoError : Error {
    using Error::Error;
};

// Malformed input: channel names, file headers, scenario scripts.
struct ParseError : Error {
    using Error::Error;
};

// Well-formed input that cannot be analyzed (no motion, constant signals,
// no surviving candidates).
struct AnalysisError : Error {
    using Error::Error;
};

inline constexpr std::uint32_t kMaxFrameId = (1u << 29) - 1;  // 29-bit extended IDs

// One CAN frame. Timestamps are seconds since the recording's clock origin.
struct CanFrame {
    double timestamp = 0.0;
    std::uint32_t frame_id = 0;
    std::vector<std::uint8_t> payload;  // 0..8 bytes
};

// One IMU sample. Axis convention: ax positive = vehicle-left lateral
// acceleration, ay positive = deceleration (nose-down pitch direction),
// az vertical.
struct ImuSample {
    double timestamp = 0.0;
    double ax = 0.0;
    double ay = 0.0;
    double az = 0.0;
};

// One GPS velocity sample. Position fields are informational; alt is carried
// but unused by the analysis.
struct GpsSample {
    double timestamp = 0.0;
    double vx = 0.0;
    double vy = 0.0;
    double vz = 0.0;
    bool has_position = false;
    double lat = 0.0;
    double lon = 0.0;
    double alt = 0.0;

    double speed() const;
};

enum class RecordingKind {
    drive,
    calibration_brake,
    calibration_steering,
    calibration_accelerator,
};

inline bool is_calibration(RecordingKind k) { return k != RecordingKind::drive; }

// A full capture session: the three streams share one clock origin.
// A calibration recording may carry an empty gps stream (vehicle in park).
struct Recording {
    std::vector<CanFrame> can;
    std::vector<ImuSample> imu;
    std::vector<GpsSample> gps;
    RecordingKind kind = RecordingKind::drive;
};

enum class Endian { MSB, LSB };

// Identity of one candidate channel: a byte-aligned unsigned field inside a
// frame's payload. Width 8 reads payload[index] directly and carries no
// endianness. Widths 9..16 read the two-byte window payload[index],
// payload[index+1]; see extract_value() for the bit semantics.
struct ChannelSpec {
    std::uint32_t frame_id = 0;
    int width_bits = 8;  // 8..16
    int index = 0;       // starting payload byte
    Endian endianness = Endian::MSB;  // meaningful only when width_bits > 8

    friend bool operator==(const ChannelSpec&, const ChannelSpec&) = default;
};

// Uniform time grid: time(i) = start + i * step.
struct TimeGrid {
    double start = 0.0;
    double step = 0.01;
    std::size_t count = 0;

    double time(std::size_t i) const { return start + static_cast<double>(i) * step; }
    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

// A channel's decoded values resampled onto a uniform grid (zero-order hold).
struct ChannelSeries {
    ChannelSpec spec;
    TimeGrid grid;
    std::vector<std::uint32_t> values;  // one per grid point, each < 2^width_bits
    double first_sample_time = 0.0;     // timestamp of the first frame used
};

enum class Action {
    decelerate,
    accelerate,
    steer_left,
    steer_right,
    steer,  // combined: both rectified directions plus their magnitude
};

// Rectified, smoothed IMU-derived signal for one vehicle action.
struct ActionSignal {
    Action action = Action::decelerate;
    TimeGrid grid;
    std::vector<double> values;  // >= 0 everywhere
};

// Per-grid-point motion indicator derived from GPS speed.
struct MotionMask {
    TimeGrid grid;
    std::vector<bool> moving;
};

// Which rectified steering component produced a channel's correlation when
// the combined steer action is analyzed.
enum class SteerDirection { none, left, right, magnitude };

// One report row. correlation is filled by the discovery step; the
// calibration metrics come from the native frame sequence of a calibration
// recording. smooth = 100 * stdev_deriv / range, smooth_display = ceil(smooth).
struct DiscoveryRow {
    ChannelSpec spec;
    double correlation = 0.0;
    std::uint32_t range = 0;
    std::uint64_t unique = 0;
    double stdev_deriv = 0.0;
    double smooth = 0.0;
    int smooth_display = 0;
    SteerDirection direction = SteerDirection::none;
};

inline double GpsSample::speed() const {
    return std::sqrt(vx * vx + vy * vy + vz * vz);
}

// Validation helpers. The parsers and the generator only ever produce valid
// objects; these exist for callers constructing values by hand.

inline bool is_valid(const CanFrame& f) {
    return f.frame_id <= kMaxFrameId && f.payload.size() <= 8 && f.timestamp >= 0.0;
}

inline bool is_valid(const ChannelSpec& s) {
    if (s.frame_id > kMaxFrameId || s.index < 0) return false;
    if (s.width_bits == 8) return s.index <= 7;
    if (s.width_bits >= 9 && s.width_bits <= 16) return s.index <= 6;
    return false;
}

inline void validate(const ChannelSpec& s) {
    if (!is_valid(s)) throw Error("invalid channel spec");
}

}  // namespace canrev
