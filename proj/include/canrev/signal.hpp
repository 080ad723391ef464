// IMU/GPS preprocessing: uniform-grid resampling, smoothing, rectified
// action signals, the GPS motion mask, and the Pearson primitive.
//
// Sign conventions (vehicle frame, IMU mounted level):
//   ay > 0  braking (forward deceleration)     -> decelerate
//   ay < 0  throttle (forward acceleration)    -> accelerate
//   ax > 0  leftward lateral acceleration      -> steer_left
//   ax < 0  rightward lateral acceleration     -> steer_right
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "canrev/types.hpp"

namespace canrev {

struct PreprocessConfig {
    std::size_t smoothing_window = 25;  // odd, in grid samples; 0.25 s at 100 Hz
    double speed_threshold = 0.1;       // m/s; GPS noise floor near standstill
    double grid_step = 0.01;            // s
};

inline void validate(const PreprocessConfig& cfg) {
    if (cfg.smoothing_window == 0 || cfg.smoothing_window % 2 == 0)
        throw AnalysisError("smoothing window must be odd and >= 1, got " +
                            std::to_string(cfg.smoothing_window));
    if (cfg.speed_threshold < 0.0)
        throw AnalysisError("speed threshold must be >= 0");
    if (cfg.grid_step <= 0.0)
        throw AnalysisError("grid step must be > 0");
}

// Grid covering [start, stop] inclusive of both ends when stop lands on a
// step boundary; a small epsilon absorbs accumulated float error so e.g.
// [0, 1] at 0.01 yields 101 points.
inline TimeGrid make_grid(double start, double stop, double step) {
    if (step <= 0.0) throw AnalysisError("grid step must be > 0");
    if (stop < start) throw AnalysisError("grid end precedes start");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    return TimeGrid{start, step, count};
}

// Zero-order hold of an irregular series onto a grid: each grid point takes
// the latest value at or before it; points before the first sample take the
// first value. times must be sorted ascending.
inline std::vector<double> hold_resample(const std::vector<double>& times,
                                         const std::vector<double>& values,
                                         const TimeGrid& grid) {
    if (times.size() != values.size()) throw AnalysisError("time/value length mismatch");
    if (times.empty()) throw AnalysisError("cannot resample an empty series");
    std::vector<double> out(grid.count);
    std::size_t j = 0;
    for (std::size_t i = 0; i < grid.count; ++i) {
        const double t = grid.time(i);
        while (j + 1 < times.size() && times[j + 1] <= t) ++j;
        out[i] = times[j] <= t ? values[j] : values.front();
    }
    return out;
}

// Centered moving average with an odd window. Near the edges the window is
// clamped to the available samples, so output length equals input length and
// no phase shift is introduced.
inline std::vector<double> moving_average(const std::vector<double>& v, std::size_t window) {
    if (window == 0 || window % 2 == 0)
        throw AnalysisError("smoothing window must be odd and >= 1, got " + std::to_string(window));
    if (window == 1 || v.empty()) return v;
    const std::size_t half = window / 2;
    const std::size_t n = v.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(n - 1, i + half);
        double sum = 0.0;
        for (std::size_t k = lo; k <= hi; ++k) sum += v[k];
        out[i] = sum / static_cast<double>(hi - lo + 1);
    }
    return out;
}

inline bool uses_lateral_axis(Action action) {
    return action == Action::steer_left || action == Action::steer_right || action == Action::steer;
}

// Builds the rectified, smoothed signal for one action on the given grid:
// resample the relevant IMU axis (ay for decelerate/accelerate, ax for
// steering), smooth, then rectify by the action's polarity. Action::steer
// yields the magnitude |ax|, the pointwise sum of the two rectifications.
inline ActionSignal action_signal(const std::vector<ImuSample>& imu, Action action,
                                  const TimeGrid& grid, const PreprocessConfig& cfg = {}) {
    validate(cfg);
    if (imu.empty()) throw AnalysisError("cannot build action signal: no IMU samples");

    const bool lateral = uses_lateral_axis(action);
    std::vector<double> times(imu.size()), axis(imu.size());
    for (std::size_t i = 0; i < imu.size(); ++i) {
        times[i] = imu[i].timestamp;
        axis[i] = lateral ? imu[i].ax : imu[i].ay;
    }

    ActionSignal out;
    out.action = action;
    out.grid = grid;
    out.values = moving_average(hold_resample(times, axis, grid), cfg.smoothing_window);
    for (double& v : out.values) {
        switch (action) {
            case Action::decelerate:
            case Action::steer_left: v = std::max(0.0, v); break;
            case Action::accelerate:
            case Action::steer_right: v = std::max(0.0, -v); break;
            case Action::steer: v = std::fabs(v); break;
        }
    }
    return out;
}

// Default grid for a recording: the IMU's time span at cfg.grid_step. The
// action signal is the reference series, so its extent defines the analysis
// window; CAN and GPS are held onto the same grid.
inline TimeGrid analysis_grid(const std::vector<ImuSample>& imu, const PreprocessConfig& cfg = {}) {
    if (imu.empty()) throw AnalysisError("cannot derive analysis grid: no IMU samples");
    return make_grid(imu.front().timestamp, imu.back().timestamp, cfg.grid_step);
}

// moving[i] = held GPS speed at grid[i] strictly above the threshold.
inline MotionMask motion_mask(const std::vector<GpsSample>& gps, const TimeGrid& grid,
                              const PreprocessConfig& cfg = {}) {
    validate(cfg);
    if (gps.empty()) throw AnalysisError("cannot build motion mask: no GPS samples");
    std::vector<double> times(gps.size()), speeds(gps.size());
    for (std::size_t i = 0; i < gps.size(); ++i) {
        times[i] = gps[i].timestamp;
        speeds[i] = gps[i].speed();
    }
    const auto held = hold_resample(times, speeds, grid);
    MotionMask mask;
    mask.grid = grid;
    mask.moving.resize(held.size());
    for (std::size_t i = 0; i < held.size(); ++i) mask.moving[i] = held[i] > cfg.speed_threshold;
    return mask;
}

// Keeps values at indices where the mask is moving, order preserved. The
// same mask must compact the action signal and every channel series so
// pairing survives.
template <typename T>
inline std::vector<T> apply_mask(const std::vector<T>& values, const MotionMask& mask) {
    if (values.size() != mask.moving.size())
        throw AnalysisError("mask length " + std::to_string(mask.moving.size()) +
                            " does not match series length " + std::to_string(values.size()));
    std::vector<T> out;
    out.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        if (mask.moving[i]) out.push_back(values[i]);
    return out;
}

// Sample Pearson correlation, two-pass. Throws on fewer than two samples or
// on constant input; callers that tolerate constant channels must check
// variance themselves or catch the error.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw AnalysisError("correlation length mismatch: " + std::to_string(x.size()) + " vs " +
                            std::to_string(y.size()));
    const std::size_t n = x.size();
    if (n < 2) throw AnalysisError("correlation requires at least 2 samples, got " + std::to_string(n));

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw AnalysisError("correlation undefined for constant input");
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace canrev
