// Synthetic recording generator: a scripted scenario rendered into CAN,
// IMU, and GPS streams with known ground truth, used as the independent
// oracle for end-to-end tests.
//
// Longitudinal physics: accel = g_a*accel_level - g_b*brake_level while
// moving, with speed clamped at zero. A stopped vehicle holding the brake
// therefore produces no IMU deceleration while the brake channel reads
// maximum; GPS masking exists to remove exactly those samples.
// Sign conventions match the analysis side: ay = -accel (braking pitches
// positive), ax = +g_s*steer*speed (left positive), az gravity.
//
// Rates: IMU 100 Hz, CAN 50 Hz per frame ID, GPS 1 Hz. Same seed, same
// binary: byte-identical output.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "canrev/types.hpp"

namespace canrev {

struct SynthGains {
    double accel = 3.0;  // m/s^2 at accel_level 1
    double brake = 5.0;  // m/s^2 at brake_level 1
    double steer = 4.0;  // lateral m/s^2 per unit steer per m/s of speed
};

struct Segment {
    double start = 0.0;
    double end = 0.0;
    double brake = 0.0;  // 0..1
    double accel = 0.0;  // 0..1
    double steer = 0.0;  // -1..1, positive = left
};

struct Scenario {
    double duration = 0.0;
    std::vector<Segment> segments;  // contiguous, covering [0, duration]
    double noise = 0.05;            // IMU noise stddev, m/s^2
    std::uint32_t seed = 1;
    RecordingKind kind = RecordingKind::drive;  // calibration kinds keep the vehicle parked
    SynthGains gains;
};

struct GroundTruth {
    ChannelSpec brake_spec;
    ChannelSpec steer_spec;
    ChannelSpec accel_spec;
    std::vector<ChannelSpec> decoy_specs;  // one representative channel per decoy frame ID
    SynthGains gains;
};

struct SynthResult {
    Recording recording;
    GroundTruth truth;
};

inline void validate(const Scenario& sc) {
    if (sc.duration <= 0.0) throw ParseError("scenario duration must be > 0");
    if (sc.noise < 0.0) throw ParseError("scenario noise must be >= 0");
    if (sc.segments.empty()) throw ParseError("scenario has no segments");
    double cursor = 0.0;
    for (const auto& s : sc.segments) {
        if (s.start != cursor)
            throw ParseError("scenario segments must be contiguous from 0; gap at t=" +
                             std::to_string(cursor));
        if (s.end <= s.start) throw ParseError("scenario segment must end after it starts");
        if (s.brake < 0.0 || s.brake > 1.0 || s.accel < 0.0 || s.accel > 1.0)
            throw ParseError("scenario brake/accel levels must be within [0, 1]");
        if (s.steer < -1.0 || s.steer > 1.0)
            throw ParseError("scenario steer angle must be within [-1, 1]");
        cursor = s.end;
    }
    if (cursor != sc.duration)
        throw ParseError("scenario segments must cover [0, duration]; they end at t=" +
                         std::to_string(cursor));
}

// Writes value into the spec's bit field, leaving all other payload bits
// untouched. Exact inverse of extract_value.
inline void encode_value(const ChannelSpec& spec, std::uint32_t value,
                         std::vector<std::uint8_t>& payload) {
    validate(spec);
    if (value >= (1u << spec.width_bits))
        throw AnalysisError("value " + std::to_string(value) + " does not fit in " +
                            std::to_string(spec.width_bits) + " bits");
    const auto idx = static_cast<std::size_t>(spec.index);
    if (spec.width_bits == 8) {
        if (idx >= payload.size()) throw AnalysisError("byte index out of range for payload");
        payload[idx] = static_cast<std::uint8_t>(value);
        return;
    }
    if (idx + 1 >= payload.size()) throw AnalysisError("window index out of range for payload");
    if (spec.endianness == Endian::MSB) {
        const int shift = 16 - spec.width_bits;
        const std::uint32_t mask = ((1u << spec.width_bits) - 1u) << shift;
        std::uint32_t word = (static_cast<std::uint32_t>(payload[idx]) << 8) | payload[idx + 1];
        word = (word & ~mask) | (value << shift);
        payload[idx] = static_cast<std::uint8_t>(word >> 8);
        payload[idx + 1] = static_cast<std::uint8_t>(word & 0xFF);
    } else {
        const std::uint32_t mask = (1u << spec.width_bits) - 1u;
        std::uint32_t word = (static_cast<std::uint32_t>(payload[idx + 1]) << 8) | payload[idx];
        word = (word & ~mask) | value;
        payload[idx] = static_cast<std::uint8_t>(word & 0xFF);
        payload[idx + 1] = static_cast<std::uint8_t>(word >> 8);
    }
}

namespace detail {

inline const Segment& segment_at(const Scenario& sc, double t) {
    for (const auto& s : sc.segments)
        if (t < s.end) return s;
    return sc.segments.back();
}

inline std::uint32_t scale_level(double level01, int width_bits) {
    const double top = static_cast<double>((1u << width_bits) - 1u);
    double v = std::round(level01 * top);
    if (v < 0.0) v = 0.0;
    if (v > top) v = top;
    return static_cast<std::uint32_t>(v);
}

// A decoy frame ID and how its payload evolves.
struct DecoySpec {
    enum class Kind { constant, counter, walk, elapsed };
    Kind kind;
    std::uint32_t frame_id;
    std::size_t payload_len;
    ChannelSpec channel;   // the representative moving field (byte 0 for constants)
    std::uint32_t step;    // counter increment or walk step bound
};

inline std::vector<DecoySpec> decoy_table() {
    std::vector<DecoySpec> d;
    using K = DecoySpec::Kind;
    for (std::uint32_t id = 100; id <= 105; ++id) {
        const std::size_t len = id == 103 ? 4 : (id == 105 ? 2 : 8);
        d.push_back({K::constant, id, len, {id, 8, 0, Endian::MSB}, 0});
    }
    d.push_back({K::counter, 300, 8, {300, 8, 0, Endian::MSB}, 1});
    d.push_back({K::counter, 301, 8, {301, 8, 3, Endian::MSB}, 5});
    d.push_back({K::counter, 302, 2, {302, 16, 0, Endian::MSB}, 77});
    d.push_back({K::counter, 303, 4, {303, 16, 2, Endian::LSB}, 131});
    d.push_back({K::counter, 304, 8, {304, 8, 1, Endian::MSB}, 3});
    d.push_back({K::counter, 305, 8, {305, 16, 4, Endian::MSB}, 997});
    for (std::uint32_t id = 400; id <= 408; ++id) {
        const int index = static_cast<int>((id - 400) % 3) * 2;
        d.push_back({K::walk, id, 8, {id, 16, index, Endian::MSB}, 300});
    }
    d.push_back({K::elapsed, 500, 8, {500, 16, 0, Endian::MSB}, 0});
    // 29-bit extended ID, same magnitude as real extended captures.
    d.push_back({K::walk, 283262976, 8, {283262976, 16, 2, Endian::MSB}, 150});
    return d;
}

}  // namespace detail

// Renders a scenario into a recording plus its ground truth. The true
// channels encode the commanded control levels linearly: brake and accel
// map [0,1] onto the full field, steer maps [-1,1] onto it. Calibration
// kinds keep speed at zero (vehicle in park) so only the CAN channels move.
inline SynthResult simulate(const Scenario& sc) {
    validate(sc);

    SynthResult out;
    out.recording.kind = sc.kind;
    out.truth.gains = sc.gains;
    out.truth.brake_spec = {209, 16, 2, Endian::MSB};
    out.truth.steer_spec = {564, 16, 2, Endian::MSB};
    out.truth.accel_spec = {190, 16, 0, Endian::MSB};

    const double imu_dt = 0.01;
    const auto n_imu = static_cast<std::size_t>(std::llround(sc.duration / imu_dt)) + 1;
    const bool parked = is_calibration(sc.kind);

    // Integrate speed at the IMU rate. realized[i] is the acceleration over
    // the step starting at sample i, so clamping at standstill zeroes it.
    std::vector<double> speed(n_imu, 0.0), realized(n_imu, 0.0);
    for (std::size_t i = 0; i + 1 < n_imu; ++i) {
        const auto& seg = detail::segment_at(sc, static_cast<double>(i) * imu_dt);
        double a = 0.0;
        if (!parked) {
            a = sc.gains.accel * seg.accel;
            if (speed[i] > 0.0) a -= sc.gains.brake * seg.brake;
        }
        double next = speed[i] + a * imu_dt;
        if (next < 0.0) next = 0.0;
        speed[i + 1] = next;
        realized[i] = (next - speed[i]) / imu_dt;
    }
    if (n_imu >= 2) realized[n_imu - 1] = realized[n_imu - 2];

    std::mt19937 rng(sc.seed);
    std::normal_distribution<double> gauss(0.0, sc.noise);
    auto draw = [&] { return sc.noise > 0.0 ? gauss(rng) : 0.0; };

    out.recording.imu.reserve(n_imu);
    for (std::size_t i = 0; i < n_imu; ++i) {
        const double t = static_cast<double>(i) * imu_dt;
        const auto& seg = detail::segment_at(sc, t);
        ImuSample s;
        s.timestamp = t;
        s.ax = sc.gains.steer * seg.steer * speed[i] + draw();
        s.ay = -realized[i] + draw();
        s.az = 9.81 + draw();
        out.recording.imu.push_back(s);
    }

    const auto n_gps = static_cast<std::size_t>(std::floor(sc.duration)) + 1;
    out.recording.gps.reserve(n_gps);
    for (std::size_t i = 0; i < n_gps; ++i) {
        GpsSample g;
        g.timestamp = static_cast<double>(i);
        g.vx = speed[std::min(i * 100, n_imu - 1)];
        out.recording.gps.push_back(g);
    }

    const auto decoys = detail::decoy_table();
    for (const auto& d : decoys) out.truth.decoy_specs.push_back(d.channel);

    std::vector<std::uint32_t> counter_state(decoys.size(), 0);
    std::vector<std::uint32_t> walk_state(decoys.size(), 0);
    std::uniform_int_distribution<int> walk_step_sign(0, 1);
    for (std::size_t k = 0; k < decoys.size(); ++k)
        if (decoys[k].kind == detail::DecoySpec::Kind::walk)
            walk_state[k] = (1u << decoys[k].channel.width_bits) / 2;

    const double can_dt = 0.02;
    const auto n_can = static_cast<std::size_t>(std::llround(sc.duration / can_dt)) + 1;
    for (std::size_t tick = 0; tick < n_can; ++tick) {
        const double t = static_cast<double>(tick) * can_dt;
        const auto& seg = detail::segment_at(sc, t);

        auto emit = [&](std::uint32_t id, std::vector<std::uint8_t> payload) {
            out.recording.can.push_back({t, id, std::move(payload)});
        };

        {
            std::vector<std::uint8_t> p(8, 0);
            encode_value(out.truth.brake_spec, detail::scale_level(seg.brake, 16), p);
            emit(out.truth.brake_spec.frame_id, std::move(p));
        }
        {
            std::vector<std::uint8_t> p(8, 0);
            encode_value(out.truth.steer_spec, detail::scale_level((seg.steer + 1.0) / 2.0, 16), p);
            emit(out.truth.steer_spec.frame_id, std::move(p));
        }
        {
            std::vector<std::uint8_t> p(8, 0);
            encode_value(out.truth.accel_spec, detail::scale_level(seg.accel, 16), p);
            emit(out.truth.accel_spec.frame_id, std::move(p));
        }

        for (std::size_t k = 0; k < decoys.size(); ++k) {
            const auto& d = decoys[k];
            std::vector<std::uint8_t> p(d.payload_len, 0);
            switch (d.kind) {
                case detail::DecoySpec::Kind::constant:
                    for (std::size_t j = 0; j < p.size(); ++j)
                        p[j] = static_cast<std::uint8_t>((d.frame_id * 7 + j * 13) & 0xFF);
                    break;
                case detail::DecoySpec::Kind::counter: {
                    const std::uint32_t top = (1u << d.channel.width_bits) - 1u;
                    encode_value(d.channel, counter_state[k] & top, p);
                    counter_state[k] = (counter_state[k] + d.step) & top;
                    break;
                }
                case detail::DecoySpec::Kind::walk: {
                    const std::uint32_t top = (1u << d.channel.width_bits) - 1u;
                    std::uniform_int_distribution<int> mag(0, static_cast<int>(d.step));
                    const int delta = (walk_step_sign(rng) ? 1 : -1) * mag(rng);
                    long long v = static_cast<long long>(walk_state[k]) + delta;
                    if (v < 0) v = -v;
                    if (v > top) v = 2LL * top - v;
                    walk_state[k] = static_cast<std::uint32_t>(v);
                    encode_value(d.channel, walk_state[k], p);
                    break;
                }
                case detail::DecoySpec::Kind::elapsed:
                    // Centisecond clock wrapping every 40.96 s: strongly
                    // autocorrelated but not monotone over a drive.
                    encode_value(d.channel, static_cast<std::uint32_t>(std::llround(t * 100.0)) & 0x0FFF, p);
                    break;
            }
            emit(d.frame_id, std::move(p));
        }
    }

    return out;
}

// Built-in scenarios.
//
// "stop-and-go": 120 s drive with three full stops (8 s, 10 s, and 32 s,
// the last held on the brake), plus steering passages both directions.
// "brake-sweep" / "steering-sweep" / "accel-sweep": 64 s parked
// calibrations stepping the control through a full triangle once per second.
inline Scenario builtin_scenario(const std::string& name, std::uint32_t seed = 1) {
    Scenario sc;
    sc.seed = seed;
    if (name == "stop-and-go") {
        sc.kind = RecordingKind::drive;
        sc.duration = 120.0;
        sc.segments = {
            {0, 8, 0, 0.5, 0},    {8, 14, 0, 0, 0.4},    {14, 20, 0, 0, -0.5},
            {20, 24, 0.6, 0, 0},  {24, 32, 1, 0, 0},     {32, 40, 0, 0.6, 0},
            {40, 48, 0, 0, 0.3},  {48, 52, 0.72, 0, 0},  {52, 62, 1, 0, 0},
            {62, 70, 0, 0.5, 0},  {70, 76, 0, 0, -0.35}, {76, 80, 0.6, 0, 0},
            {80, 112, 1, 0, 0},   {112, 118, 0, 0.4, 0}, {118, 120, 0.3, 0, 0},
        };
        return sc;
    }

    const bool brake = name == "brake-sweep";
    const bool steering = name == "steering-sweep";
    const bool accel = name == "accel-sweep";
    if (!brake && !steering && !accel)
        throw ParseError("unknown builtin scenario '" + name + "'");

    sc.kind = brake ? RecordingKind::calibration_brake
                    : steering ? RecordingKind::calibration_steering
                               : RecordingKind::calibration_accelerator;
    sc.duration = 64.0;
    for (int k = 0; k < 64; ++k) {
        const double level = k < 32 ? k / 31.0 : (63 - k) / 31.0;
        Segment seg;
        seg.start = k;
        seg.end = k + 1;
        if (brake) seg.brake = std::min(1.0, level);
        if (accel) seg.accel = std::min(1.0, level);
        if (steering) seg.steer = 2.0 * std::min(1.0, level) - 1.0;
        sc.segments.push_back(seg);
    }
    return sc;
}

// Scenario script: one directive per line, '#' comments.
//
//   duration 120
//   noise 0.05
//   seed 7
//   kind drive              # or calibration-brake / -steering / -accelerator
//   gains 3.0 5.0 4.0       # accel brake steer
//   segment 0 8 0 0.5 0     # start end brake accel steer
inline Scenario parse_scenario(std::istream& in, const std::string& origin) {
    Scenario sc;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        auto fail = [&](const std::string& why) -> ParseError {
            return ParseError(origin + ":" + std::to_string(lineno) + ": " + why);
        };
        if (key == "duration") {
            if (!(ls >> sc.duration)) throw fail("expected a number after 'duration'");
        } else if (key == "noise") {
            if (!(ls >> sc.noise)) throw fail("expected a number after 'noise'");
        } else if (key == "seed") {
            if (!(ls >> sc.seed)) throw fail("expected an integer after 'seed'");
        } else if (key == "gains") {
            if (!(ls >> sc.gains.accel >> sc.gains.brake >> sc.gains.steer))
                throw fail("expected three numbers after 'gains'");
        } else if (key == "kind") {
            std::string kind;
            ls >> kind;
            if (kind == "drive") sc.kind = RecordingKind::drive;
            else if (kind == "calibration-brake") sc.kind = RecordingKind::calibration_brake;
            else if (kind == "calibration-steering") sc.kind = RecordingKind::calibration_steering;
            else if (kind == "calibration-accelerator") sc.kind = RecordingKind::calibration_accelerator;
            else throw fail("unknown recording kind '" + kind + "'");
        } else if (key == "segment") {
            Segment seg;
            if (!(ls >> seg.start >> seg.end >> seg.brake >> seg.accel >> seg.steer))
                throw fail("expected 'segment <start> <end> <brake> <accel> <steer>'");
            sc.segments.push_back(seg);
        } else {
            throw fail("unknown directive '" + key + "'");
        }
    }
    validate(sc);
    return sc;
}

inline Scenario read_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return parse_scenario(in, path);
}

// Writers emitting the ingest module's formats, so synthetic recordings
// round-trip through the real parsers.

namespace detail {

inline std::ofstream create_or_throw(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot create '" + path + "'");
    return out;
}

}  // namespace detail

inline void write_can_log(const std::string& path, const std::vector<CanFrame>& frames) {
    auto out = detail::create_or_throw(path);
    char buf[96];
    for (const auto& f : frames) {
        const int n = std::snprintf(buf, sizeof(buf), f.frame_id > 0x7FF ? "(%.6f) can0 %08X#" : "(%.6f) can0 %03X#",
                                    f.timestamp, f.frame_id);
        out.write(buf, n);
        for (const auto b : f.payload) {
            std::snprintf(buf, sizeof(buf), "%02X", b);
            out.write(buf, 2);
        }
        out.put('\n');
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

inline void write_imu_csv(const std::string& path, const std::vector<ImuSample>& samples) {
    auto out = detail::create_or_throw(path);
    out << "t_s,ax,ay,az\n";
    char buf[160];
    for (const auto& s : samples) {
        const int n = std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f\n", s.timestamp, s.ax, s.ay, s.az);
        out.write(buf, n);
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

inline void write_gps_csv(const std::string& path, const std::vector<GpsSample>& samples) {
    auto out = detail::create_or_throw(path);
    out << "t_s,vx,vy,vz\n";
    char buf[160];
    for (const auto& s : samples) {
        const int n = std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f\n", s.timestamp, s.vx, s.vy, s.vz);
        out.write(buf, n);
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace canrev
