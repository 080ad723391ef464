// The two analysis algorithms: the rate-of-change correlation sweep and the
// vehicle controls discovery ranking.
//
// The sweep correlates every candidate channel in a drive recording against
// one rectified IMU action signal, optionally masking out stationary
// periods via GPS speed. Discovery re-ranks the sweep's top candidates by
// their behaviour in a dedicated calibration recording, where one control
// is exercised through its range and the vehicle otherwise sits still.
//
// All outputs are deterministic: the channel sweep runs as a parallel map
// whose results are written by index, then sorted with a total order
// (correlation descending, canonical name ascending).
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "canrev/naming.hpp"
#include "canrev/signal.hpp"
#include "canrev/tokenizer.hpp"
#include "canrev/types.hpp"

namespace canrev {

// One sweep result. Channels that are constant after masking cannot be
// correlated; they are kept with correlation 0 and the undefined flag so
// the sweep survives idle channels.
struct CorrelationRow {
    ChannelSpec spec;
    double correlation = 0.0;
    SteerDirection direction = SteerDirection::none;
    bool undefined = false;
};

struct CorrelationTable {
    Action action = Action::decelerate;
    std::vector<CorrelationRow> rows;  // correlation descending, name ascending
    bool masking_used = false;
    std::size_t top_n = 25;
};

struct DiscoveryConfig {
    std::size_t top_n = 25;
    std::uint64_t min_unique = 16;
    double min_correlation = 0.5;
};

struct AnalysisConfig {
    PreprocessConfig preprocess;
    DiscoveryConfig discovery;
    bool use_gps_mask = true;
    std::size_t threads = 0;  // 0 = hardware concurrency
};

namespace detail {

// Deterministic parallel map: body(i) writes only to slot i of caller-owned
// storage. The first exception (by index) is rethrown after all workers join.
template <typename Body>
inline void parallel_for(std::size_t n, std::size_t threads, Body&& body) {
    if (threads == 0) threads = std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
    threads = std::min(threads, n);

    std::vector<std::exception_ptr> errors(n);
    auto guarded = [&](std::size_t i) {
        try {
            body(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };

    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) guarded(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) guarded(i);
            });
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline bool is_constant(const std::vector<double>& v) {
    for (const double x : v)
        if (x != v.front()) return false;
    return true;
}

inline bool name_less(const ChannelSpec& a, const ChannelSpec& b) {
    return channel_name(a) < channel_name(b);
}

}  // namespace detail

// Correlates every candidate channel of a drive recording against the
// action's rectified IMU signal. For Action::steer, each channel is scored
// against the left, right, and magnitude variants and keeps its best, with
// the winning variant recorded in the row's direction flag.
inline CorrelationTable rate_of_change_correlation(const Recording& drive, Action action,
                                                   const AnalysisConfig& cfg = {}) {
    if (drive.kind != RecordingKind::drive)
        throw AnalysisError("correlation sweep requires a drive recording");
    if (drive.can.empty()) throw AnalysisError("no CAN frames in recording");
    if (drive.imu.empty()) throw AnalysisError("no IMU samples in recording");
    validate(cfg.preprocess);

    const TimeGrid grid = analysis_grid(drive.imu, cfg.preprocess);

    struct Variant {
        SteerDirection direction;
        std::vector<double> values;
        bool usable = false;
    };
    std::vector<Variant> variants;
    if (action == Action::steer) {
        variants.push_back({SteerDirection::left,
                            action_signal(drive.imu, Action::steer_left, grid, cfg.preprocess).values});
        variants.push_back({SteerDirection::right,
                            action_signal(drive.imu, Action::steer_right, grid, cfg.preprocess).values});
        variants.push_back({SteerDirection::magnitude,
                            action_signal(drive.imu, Action::steer, grid, cfg.preprocess).values});
    } else {
        variants.push_back({SteerDirection::none,
                            action_signal(drive.imu, action, grid, cfg.preprocess).values});
    }

    MotionMask mask;
    mask.grid = grid;
    if (cfg.use_gps_mask) {
        if (drive.gps.empty()) throw AnalysisError("GPS samples required when masking is enabled");
        mask = motion_mask(drive.gps, grid, cfg.preprocess);
        const auto moving = static_cast<std::size_t>(
            std::count(mask.moving.begin(), mask.moving.end(), true));
        if (moving < 2) throw AnalysisError("no motion in recording");
        for (auto& v : variants) v.values = apply_mask(v.values, mask);
    } else {
        mask.moving.assign(grid.count, true);
    }

    bool any_usable = false;
    for (auto& v : variants) {
        v.usable = !detail::is_constant(v.values);
        any_usable = any_usable || v.usable;
    }
    if (!any_usable) throw AnalysisError("action signal is constant; nothing to correlate");

    // Group frames per ID so each channel decode walks only its own frames.
    std::map<std::uint32_t, std::vector<CanFrame>> frames_by_id;
    for (const auto& f : drive.can) frames_by_id[f.frame_id].push_back(f);

    const auto specs = enumerate_all_channels(drive.can);
    std::vector<CorrelationRow> rows(specs.size());
    detail::parallel_for(specs.size(), cfg.threads, [&](std::size_t i) {
        const auto& spec = specs[i];
        const auto series = build_series(spec, frames_by_id.at(spec.frame_id), grid);
        std::vector<double> vals(series.values.begin(), series.values.end());
        vals = apply_mask(vals, mask);

        CorrelationRow row;
        row.spec = spec;
        if (detail::is_constant(vals)) {
            row.undefined = true;
        } else {
            bool first = true;
            for (const auto& v : variants) {
                if (!v.usable) continue;
                const double c = pearson(vals, v.values);
                if (first || c > row.correlation) {
                    row.correlation = c;
                    row.direction = action == Action::steer ? v.direction : SteerDirection::none;
                    first = false;
                }
            }
        }
        rows[i] = row;
    });

    std::sort(rows.begin(), rows.end(), [](const CorrelationRow& a, const CorrelationRow& b) {
        if (a.correlation != b.correlation) return a.correlation > b.correlation;
        return detail::name_less(a.spec, b.spec);
    });
    if (rows.size() > cfg.discovery.top_n) rows.resize(cfg.discovery.top_n);

    CorrelationTable table;
    table.action = action;
    table.rows = std::move(rows);
    table.masking_used = cfg.use_gps_mask;
    table.top_n = cfg.discovery.top_n;
    return table;
}

// Computes the calibration metrics for each candidate over the native frame
// sequence of a calibration recording (no resampling: the derivative must
// measure per-message step size). Candidates whose frame ID never appears,
// or whose value never changes, are dropped; absences are reported through
// warnings rather than errors.
inline std::vector<DiscoveryRow> analyze_calibration(const Recording& cal,
                                                     const std::vector<ChannelSpec>& candidates,
                                                     std::vector<std::string>* warnings = nullptr) {
    if (!is_calibration(cal.kind))
        throw AnalysisError("calibration metrics require a calibration recording");
    if (candidates.empty()) throw AnalysisError("no candidate channels to analyze");

    std::vector<DiscoveryRow> out;
    out.reserve(candidates.size());
    for (const auto& spec : candidates) {
        const auto trace = decode_trace(spec, cal.can);
        if (trace.values.empty()) {
            if (warnings)
                warnings->push_back("channel " + channel_name(spec) +
                                    ": frame ID absent from calibration recording, dropped");
            continue;
        }

        const auto [min_it, max_it] = std::minmax_element(trace.values.begin(), trace.values.end());
        const std::uint32_t range = *max_it - *min_it;
        if (range == 0) continue;

        const std::set<std::uint32_t> distinct(trace.values.begin(), trace.values.end());

        double mean = 0.0;
        const std::size_t nd = trace.values.size() - 1;
        for (std::size_t i = 0; i < nd; ++i)
            mean += static_cast<double>(trace.values[i + 1]) - static_cast<double>(trace.values[i]);
        mean /= static_cast<double>(nd);
        double var = 0.0;
        for (std::size_t i = 0; i < nd; ++i) {
            const double d = static_cast<double>(trace.values[i + 1]) -
                             static_cast<double>(trace.values[i]) - mean;
            var += d * d;
        }
        const double stdev = std::sqrt(var / static_cast<double>(nd));

        DiscoveryRow row;
        row.spec = spec;
        row.range = range;
        row.unique = distinct.size();
        row.stdev_deriv = stdev;
        row.smooth = 100.0 * stdev / static_cast<double>(range);
        row.smooth_display = static_cast<int>(std::ceil(row.smooth));
        out.push_back(row);
    }
    return out;
}

// Re-ranks the correlation table's top candidates by calibration smoothness:
// filter by unique count and correlation, sort by display smoothness then
// correlation, and keep every row tied at the smallest display value.
inline std::vector<DiscoveryRow> discover_controls(const CorrelationTable& table, const Recording& cal,
                                                   const DiscoveryConfig& cfg = {},
                                                   std::vector<std::string>* warnings = nullptr) {
    if (table.rows.empty()) throw AnalysisError("empty correlation table");

    const std::size_t take = std::min(cfg.top_n, table.rows.size());
    std::vector<ChannelSpec> candidates;
    candidates.reserve(take);
    for (std::size_t i = 0; i < take; ++i) candidates.push_back(table.rows[i].spec);

    auto rows = analyze_calibration(cal, candidates, warnings);

    // Attach each row's drive correlation and steering direction.
    for (auto& row : rows) {
        for (std::size_t i = 0; i < take; ++i) {
            if (table.rows[i].spec == row.spec) {
                row.correlation = table.rows[i].correlation;
                row.direction = table.rows[i].direction;
                break;
            }
        }
    }

    std::erase_if(rows, [&](const DiscoveryRow& r) {
        return r.unique < cfg.min_unique || r.correlation < cfg.min_correlation;
    });
    if (rows.empty()) throw AnalysisError("no candidate channels survive discovery");

    std::sort(rows.begin(), rows.end(), [](const DiscoveryRow& a, const DiscoveryRow& b) {
        if (a.smooth_display != b.smooth_display) return a.smooth_display < b.smooth_display;
        if (a.correlation != b.correlation) return a.correlation > b.correlation;
        return detail::name_less(a.spec, b.spec);
    });
    const int best = rows.front().smooth_display;
    std::erase_if(rows, [&](const DiscoveryRow& r) { return r.smooth_display != best; });
    return rows;
}

// One action's full result. Either error is non-empty, or table is filled;
// discovered is filled only when a calibration was supplied and survived.
struct ActionReport {
    Action action = Action::decelerate;
    CorrelationTable table;
    std::vector<DiscoveryRow> discovered;
    bool discovery_ran = false;
    std::vector<std::string> warnings;
    std::string error;
};

inline Action action_for_calibration(RecordingKind kind) {
    switch (kind) {
        case RecordingKind::calibration_brake: return Action::decelerate;
        case RecordingKind::calibration_steering: return Action::steer;
        case RecordingKind::calibration_accelerator: return Action::accelerate;
        case RecordingKind::drive: break;
    }
    throw AnalysisError("drive recording is not a calibration");
}

// Runs correlation for the three controls and discovery for each control
// that has a calibration recording. One action failing does not abort the
// others; its report carries the error message instead.
inline std::vector<ActionReport> run_full_analysis(const Recording& drive,
                                                   const std::vector<Recording>& calibrations,
                                                   const AnalysisConfig& cfg = {}) {
    std::map<Action, const Recording*> cal_for;
    for (const auto& cal : calibrations) {
        if (!is_calibration(cal.kind))
            throw AnalysisError("calibration list contains a drive recording");
        cal_for[action_for_calibration(cal.kind)] = &cal;
    }

    std::vector<ActionReport> reports;
    for (const Action action : {Action::decelerate, Action::accelerate, Action::steer}) {
        ActionReport report;
        report.action = action;
        try {
            report.table = rate_of_change_correlation(drive, action, cfg);
            if (auto it = cal_for.find(action); it != cal_for.end()) {
                report.discovered =
                    discover_controls(report.table, *it->second, cfg.discovery, &report.warnings);
                report.discovery_ran = true;
            }
        } catch (const Error& e) {
            report.error = e.what();
        }
        reports.push_back(std::move(report));
    }
    return reports;
}

}  // namespace canrev
