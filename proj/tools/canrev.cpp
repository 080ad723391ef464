// canrev: discovers which CAN channels carry brake, accelerator, and
// steering positions by correlating payload fields against IMU motion,
// with GPS speed masking out stationary periods.
//
// Exit codes: 0 success, 1 analysis failure, 2 usage or input failure.
// stdout and --out files carry data only; diagnostics go to stderr.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "canrev/canrev.hpp"

namespace {

struct AnalyzeArgs {
    std::string can_path;
    std::string imu_path;
    std::string gps_path;
    std::string cal_path;
    std::string action = "decelerate";
    std::string format = "csv";
    std::string out_path;
    bool no_gps_mask = false;
    canrev::AnalysisConfig cfg;
};

struct SynthArgs {
    std::string builtin;
    std::string scenario_path;
    std::string out_dir = ".";
    std::uint32_t seed = 1;
    bool seed_given = false;
};

void add_recording_options(CLI::App* cmd, AnalyzeArgs& a) {
    cmd->add_option("--can", a.can_path, "drive CAN log (candump or CSV)")->required();
    cmd->add_option("--imu", a.imu_path, "drive IMU CSV (t_s,ax,ay,az)")->required();
    cmd->add_option("--gps", a.gps_path, "drive GPS CSV (t_s,vx,vy,vz[,lat,lon,alt])");
    cmd->add_option("--action", a.action, "decelerate | accelerate | steer | steer_left | steer_right")
        ->required();
    cmd->add_flag("--no-gps-mask", a.no_gps_mask, "skip stationary-period masking");
    cmd->add_option("--top-n", a.cfg.discovery.top_n, "correlation table size")->capture_default_str();
    cmd->add_option("--window", a.cfg.preprocess.smoothing_window, "smoothing window, odd sample count")
        ->capture_default_str();
    cmd->add_option("--speed-threshold", a.cfg.preprocess.speed_threshold, "motion threshold in m/s")
        ->capture_default_str();
    cmd->add_option("--grid-step", a.cfg.preprocess.grid_step, "resampling step in seconds")
        ->capture_default_str();
    cmd->add_option("--threads", a.cfg.threads, "worker threads (0 = hardware)")->capture_default_str();
    cmd->add_option("--format", a.format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", a.out_path, "report file (default stdout)");
}

// Flag coherence is checked before any file is opened.
void check_mask_flags(const AnalyzeArgs& a) {
    if (a.gps_path.empty() && !a.no_gps_mask)
        throw canrev::ParseError("--gps is required unless --no-gps-mask is given");
}

canrev::LoadedRecording load_drive(const AnalyzeArgs& a) {
    std::optional<std::string> gps;
    if (!a.gps_path.empty()) gps = a.gps_path;
    return canrev::load_recording(a.can_path, a.imu_path, gps, canrev::RecordingKind::drive,
                                  !a.no_gps_mask);
}

void emit(const AnalyzeArgs& a, const std::string& body) {
    if (a.out_path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream out(a.out_path, std::ios::binary);
    if (!out) throw canrev::IoError("cannot create '" + a.out_path + "'");
    out << body;
    if (!out) throw canrev::IoError("failed writing '" + a.out_path + "'");
}

int cmd_correlate(AnalyzeArgs& a) {
    check_mask_flags(a);
    const canrev::Action action = canrev::parse_action(a.action);
    a.cfg.use_gps_mask = !a.no_gps_mask;

    auto loaded = load_drive(a);
    if (loaded.report.dropped_lines > 0)
        std::cerr << "warning: skipped " << loaded.report.dropped_lines << " malformed input lines\n";

    const auto table = canrev::rate_of_change_correlation(loaded.recording, action, a.cfg);
    std::ostringstream body;
    if (a.format == "json")
        canrev::write_correlation_json(body, table);
    else
        canrev::write_correlation_csv(body, table);
    emit(a, body.str());
    return 0;
}

canrev::RecordingKind calibration_kind_for(canrev::Action action) {
    switch (action) {
        case canrev::Action::decelerate: return canrev::RecordingKind::calibration_brake;
        case canrev::Action::accelerate: return canrev::RecordingKind::calibration_accelerator;
        case canrev::Action::steer:
        case canrev::Action::steer_left:
        case canrev::Action::steer_right: return canrev::RecordingKind::calibration_steering;
    }
    return canrev::RecordingKind::calibration_brake;
}

int cmd_discover(AnalyzeArgs& a) {
    check_mask_flags(a);
    const canrev::Action action = canrev::parse_action(a.action);
    a.cfg.use_gps_mask = !a.no_gps_mask;

    auto loaded = load_drive(a);

    canrev::Recording cal;
    cal.kind = calibration_kind_for(action);
    std::size_t cal_dropped = 0;
    cal.can = canrev::read_can_log(a.cal_path, &cal_dropped);
    if (loaded.report.dropped_lines + cal_dropped > 0)
        std::cerr << "warning: skipped " << loaded.report.dropped_lines + cal_dropped
                  << " malformed input lines\n";

    const auto table = canrev::rate_of_change_correlation(loaded.recording, action, a.cfg);
    std::vector<std::string> warnings;
    const auto rows = canrev::discover_controls(table, cal, a.cfg.discovery, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

    std::ostringstream body;
    if (a.format == "json")
        canrev::write_discovery_json(body, action, table.masking_used, rows);
    else
        canrev::write_discovery_csv(body, rows);
    emit(a, body.str());
    return 0;
}

nlohmann::ordered_json spec_json(const canrev::ChannelSpec& spec) {
    return {{"id", spec.frame_id},
            {"channel", canrev::field_name(spec)},
            {"name", canrev::channel_name(spec)}};
}

int cmd_synth(SynthArgs& s) {
    canrev::Scenario sc;
    std::string label;
    if (!s.builtin.empty()) {
        sc = canrev::builtin_scenario(s.builtin, s.seed);
        label = s.builtin;
    } else {
        sc = canrev::read_scenario(s.scenario_path);
        if (s.seed_given) sc.seed = s.seed;
        label = s.scenario_path;
    }

    const auto result = canrev::simulate(sc);

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(s.out_dir, ec);
    if (ec) throw canrev::IoError("cannot create directory '" + s.out_dir + "': " + ec.message());
    const auto path = [&](const char* name) { return (fs::path(s.out_dir) / name).string(); };

    canrev::write_can_log(path("can.log"), result.recording.can);
    canrev::write_imu_csv(path("imu.csv"), result.recording.imu);
    canrev::write_gps_csv(path("gps.csv"), result.recording.gps);

    nlohmann::ordered_json manifest;
    manifest["scenario"] = label;
    manifest["seed"] = sc.seed;
    manifest["kind"] = sc.kind == canrev::RecordingKind::drive ? "drive"
                       : sc.kind == canrev::RecordingKind::calibration_brake ? "calibration-brake"
                       : sc.kind == canrev::RecordingKind::calibration_steering
                           ? "calibration-steering"
                           : "calibration-accelerator";
    manifest["gains"] = {{"accel", result.truth.gains.accel},
                         {"brake", result.truth.gains.brake},
                         {"steer", result.truth.gains.steer}};
    manifest["brake"] = spec_json(result.truth.brake_spec);
    manifest["steer"] = spec_json(result.truth.steer_spec);
    manifest["accel"] = spec_json(result.truth.accel_spec);
    manifest["decoys"] = nlohmann::ordered_json::array();
    for (const auto& d : result.truth.decoy_specs) manifest["decoys"].push_back(spec_json(d));

    std::ofstream mf(path("ground_truth.json"), std::ios::binary);
    if (!mf) throw canrev::IoError("cannot create '" + path("ground_truth.json") + "'");
    mf << manifest.dump(2) << "\n";
    if (!mf) throw canrev::IoError("failed writing '" + path("ground_truth.json") + "'");

    std::cerr << "wrote can.log, imu.csv, gps.csv, ground_truth.json to " << s.out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CAN channel discovery from IMU/GPS motion correlation"};
    app.require_subcommand(1);

    AnalyzeArgs corr_args;
    auto* correlate = app.add_subcommand("correlate", "rank channels by correlation with one action");
    add_recording_options(correlate, corr_args);

    AnalyzeArgs disc_args;
    auto* discover = app.add_subcommand("discover", "full discovery: correlation plus calibration ranking");
    add_recording_options(discover, disc_args);
    discover->add_option("--cal", disc_args.cal_path, "calibration CAN log for the action")->required();
    discover->add_option("--min-unique", disc_args.cfg.discovery.min_unique, "unique-value filter")
        ->capture_default_str();
    discover
        ->add_option("--min-correlation", disc_args.cfg.discovery.min_correlation, "correlation filter")
        ->capture_default_str();

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "generate a synthetic recording with known ground truth");
    auto* builtin_opt = synth->add_option(
        "--builtin", synth_args.builtin, "stop-and-go | brake-sweep | steering-sweep | accel-sweep");
    synth->add_option("--scenario", synth_args.scenario_path, "scenario script file")
        ->excludes(builtin_opt);
    auto* seed_opt = synth->add_option("--seed", synth_args.seed, "RNG seed")->capture_default_str();
    synth->add_option("--out", synth_args.out_dir, "output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (correlate->parsed()) return cmd_correlate(corr_args);
        if (discover->parsed()) return cmd_discover(disc_args);
        synth_args.seed_given = seed_opt->count() > 0;
        if (synth->parsed()) {
            if (synth_args.builtin.empty() && synth_args.scenario_path.empty())
                throw canrev::ParseError("synth needs --builtin or --scenario");
            return cmd_synth(synth_args);
        }
    } catch (const canrev::AnalysisError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const canrev::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const canrev::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const canrev::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
