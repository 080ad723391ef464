// Shipping gate: exercises every release criterion end to end and prints
// one PASS/FAIL line per criterion. Exit status is the failure count, so
// ctest fails if any line fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "canrev/canrev.hpp"
#include "vehicle_fixtures.hpp"

using namespace canrev;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail = "") {
    if (!ok) ++failures;
    std::printf("%s: %s%s%s\n", ok ? "PASS" : "FAIL", name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
}

std::string underscored(std::string s) {
    for (auto& c : s)
        if (c == ' ') c = '_';
    return s;
}

// 1. Transcribed bench rows: display smoothness is ceil(100 * stdev / range).
bool smooth_arithmetic(std::string& detail) {
    for (const auto& row : fixtures::metric_rows()) {
        const int computed =
            static_cast<int>(std::ceil(100.0 * static_cast<double>(row.stdev) /
                                       static_cast<double>(row.range)));
        if (computed != row.smooth) {
            detail = "row " + std::to_string(row.id) + " " + row.channel + ": computed " +
                     std::to_string(computed) + ", transcribed " + std::to_string(row.smooth);
            return false;
        }
    }
    detail = std::to_string(fixtures::metric_rows().size()) + " transcribed rows";
    return true;
}

// 2. Every transcribed channel string parses and reprints canonically, plus
// a fuzzed round-trip over random valid specs.
bool name_codec(std::string& detail) {
    std::size_t names = 0;
    auto check_string = [&](std::uint32_t id, const std::string& channel) {
        const std::string full = std::to_string(id) + "_" + channel;
        const auto spec = parse_channel_name(full);
        ++names;
        return spec.frame_id == id && channel_name(spec) == underscored(full);
    };
    for (const auto& row : fixtures::metric_rows())
        if (!check_string(row.id, row.channel)) {
            detail = std::string("metric row ") + row.channel;
            return false;
        }
    for (const auto& row : fixtures::name_rows())
        if (!check_string(row.id, row.channel)) {
            detail = std::string("name row ") + row.channel;
            return false;
        }

    std::mt19937 rng(424242);
    std::uniform_int_distribution<int> width(8, 16);
    std::uniform_int_distribution<std::uint32_t> id(0, kMaxFrameId);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int i = 0; i < 10000; ++i) {
        ChannelSpec spec;
        spec.frame_id = id(rng);
        spec.width_bits = width(rng);
        spec.endianness = spec.width_bits == 8 || coin(rng) ? Endian::MSB : Endian::LSB;
        std::uniform_int_distribution<int> index(0, spec.width_bits == 8 ? 7 : 6);
        spec.index = index(rng);
        if (!(parse_channel_name(channel_name(spec)) == spec)) {
            detail = "fuzzed spec " + channel_name(spec);
            return false;
        }
    }
    detail = std::to_string(names) + " transcribed names, 10000 fuzzed specs";
    return true;
}

// 3. Enumeration yields L + 16*(L-1) candidate channels.
bool enumeration_count(std::string& detail) {
    if (enumerate_channels(1, 8).size() != 120) {
        detail = "expected 120 at payload length 8";
        return false;
    }
    for (std::size_t len = 2; len <= 8; ++len) {
        const auto got = enumerate_channels(1, len).size();
        const auto want = len + 16 * (len - 1);
        if (got != want) {
            detail = "length " + std::to_string(len) + ": got " + std::to_string(got);
            return false;
        }
    }
    return true;
}

// 4. encode then extract is the identity for every field geometry.
bool codec_identity(std::string& detail) {
    std::mt19937 rng(77);
    std::uniform_int_distribution<int> byte(0, 255);
    for (int width = 8; width <= 16; ++width) {
        for (int e = 0; e < (width == 8 ? 1 : 2); ++e) {
            const int max_index = width == 8 ? 7 : 6;
            for (int index = 0; index <= max_index; ++index) {
                const ChannelSpec spec{3, width, index, e == 0 ? Endian::MSB : Endian::LSB};
                for (int trial = 0; trial < 1000; ++trial) {
                    std::vector<std::uint8_t> payload(8);
                    for (auto& b : payload) b = static_cast<std::uint8_t>(byte(rng));
                    const std::uint32_t value = rng() & ((1u << width) - 1u);
                    encode_value(spec, value, payload);
                    if (extract_value(spec, payload) != value) {
                        detail = channel_name(spec) + " value " + std::to_string(value);
                        return false;
                    }
                }
            }
        }
    }
    return true;
}

// 5. Correlation: hand-computed case, affine invariance, symmetry.
bool correlation_properties(std::string& detail) {
    const std::vector<double> x{1, 2, 3}, y{1, 2, 4};
    if (std::fabs(pearson(x, y) - 0.9819805) > 1e-6) {
        detail = "hand case off";
        return false;
    }
    std::mt19937 rng(99);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> a(64), b(64);
        for (auto& v : a) v = gauss(rng);
        for (std::size_t i = 0; i < a.size(); ++i) b[i] = 2.5 * a[i] - 7.0;
        if (std::fabs(pearson(a, b) - 1.0) > 1e-9) {
            detail = "affine invariance off";
            return false;
        }
        for (auto& v : b) v = gauss(rng);
        const double r = pearson(a, b);
        if (std::fabs(r - pearson(b, a)) > 1e-12 || r < -1.0 - 1e-12 || r > 1.0 + 1e-12) {
            detail = "symmetry or bounds off";
            return false;
        }
    }
    return true;
}

struct SweepArtifacts {
    Recording drive;
    GroundTruth truth;
    Recording brake_cal;
    Recording steer_cal;
    CorrelationTable masked;
    CorrelationTable unmasked;
    CorrelationTable steer_masked;
    double seconds = 0.0;
    std::string error;
};

SweepArtifacts build_sweeps() {
    SweepArtifacts art;
    try {
        auto drive_res = simulate(builtin_scenario("stop-and-go", 7));
        art.drive = std::move(drive_res.recording);
        art.truth = drive_res.truth;
        art.brake_cal = simulate(builtin_scenario("brake-sweep", 11)).recording;
        art.steer_cal = simulate(builtin_scenario("steering-sweep", 13)).recording;

        AnalysisConfig cfg;
        cfg.threads = 4;
        cfg.discovery.top_n = 200;

        const auto t0 = std::chrono::steady_clock::now();
        art.masked = rate_of_change_correlation(art.drive, Action::decelerate, cfg);
        art.steer_masked = rate_of_change_correlation(art.drive, Action::steer, cfg);
        cfg.use_gps_mask = false;
        art.unmasked = rate_of_change_correlation(art.drive, Action::decelerate, cfg);
        const auto t1 = std::chrono::steady_clock::now();
        art.seconds = std::chrono::duration<double>(t1 - t0).count();
    } catch (const std::exception& e) {
        art.error = e.what();
    }
    return art;
}

const CorrelationRow* find_row(const CorrelationTable& table, const ChannelSpec& spec) {
    for (const auto& row : table.rows)
        if (row.spec == spec) return &row;
    return nullptr;
}

// 6. Discovery recovers the planted brake and steering channels from the
// synthetic drive among 20+ decoy frame IDs.
bool ground_truth_recovery(const SweepArtifacts& art, std::string& detail) {
    if (!art.error.empty()) {
        detail = art.error;
        return false;
    }
    std::set<std::uint32_t> ids;
    for (const auto& f : art.drive.can) ids.insert(f.frame_id);
    ids.erase(art.truth.brake_spec.frame_id);
    ids.erase(art.truth.steer_spec.frame_id);
    ids.erase(art.truth.accel_spec.frame_id);
    if (ids.size() < 20) {
        detail = "only " + std::to_string(ids.size()) + " decoy frame IDs";
        return false;
    }

    const auto t0 = std::chrono::steady_clock::now();
    const auto brake_rows = discover_controls(art.masked, art.brake_cal, DiscoveryConfig{});
    const auto steer_rows = discover_controls(art.steer_masked, art.steer_cal, DiscoveryConfig{});
    const auto t1 = std::chrono::steady_clock::now();
    const double total = art.seconds + std::chrono::duration<double>(t1 - t0).count();

    const auto has_id = [](const std::vector<DiscoveryRow>& rows, std::uint32_t id) {
        for (const auto& r : rows)
            if (r.spec.frame_id == id) return true;
        return false;
    };
    if (!has_id(brake_rows, art.truth.brake_spec.frame_id)) {
        detail = "brake frame ID missing from decelerate discovery";
        return false;
    }
    if (!has_id(steer_rows, art.truth.steer_spec.frame_id)) {
        detail = "steering frame ID missing from steer discovery";
        return false;
    }
    if (total >= 30.0) {
        detail = "took " + std::to_string(total) + " s";
        return false;
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%zu decoy IDs, %.1f s", ids.size(), total);
    detail = buf;
    return true;
}

// 7. Removing stationary periods lifts the true brake channel's correlation
// by at least 0.10 on a drive with a long brake-held standstill.
bool masking_improvement(const SweepArtifacts& art, std::string& detail) {
    if (!art.error.empty()) {
        detail = art.error;
        return false;
    }
    const auto* with_mask = find_row(art.masked, art.truth.brake_spec);
    const auto* without = find_row(art.unmasked, art.truth.brake_spec);
    if (!with_mask || !without) {
        detail = "true brake channel missing from a correlation table";
        return false;
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.3f masked vs %.3f unmasked", with_mask->correlation,
                  without->correlation);
    detail = buf;
    return with_mask->correlation - without->correlation >= 0.10;
}

// 8. Narrower same-index MSB windows of the planted 16-bit field score
// within 0.05 of the parent.
bool alias_coherence(const SweepArtifacts& art, std::string& detail) {
    if (!art.error.empty()) {
        detail = art.error;
        return false;
    }
    const auto* parent = find_row(art.masked, art.truth.brake_spec);
    if (!parent) {
        detail = "parent channel missing";
        return false;
    }
    for (int width = 9; width <= 15; ++width) {
        ChannelSpec alias = art.truth.brake_spec;
        alias.width_bits = width;
        const auto* row = find_row(art.masked, alias);
        if (!row) {
            detail = channel_name(alias) + " missing from the table";
            return false;
        }
        if (std::fabs(row->correlation - parent->correlation) > 0.05) {
            detail = channel_name(alias) + " drifts " +
                     std::to_string(std::fabs(row->correlation - parent->correlation));
            return false;
        }
    }
    detail = "widths 9..15 all within 0.05";
    return true;
}

std::string read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 9. Two CLI discovery runs over the same inputs, parallelism on, emit
// byte-identical reports.
bool cli_determinism(std::string& detail) {
    const char* cli = std::getenv("CANREV_CLI");
    if (!cli) {
        detail = "CANREV_CLI not set";
        return false;
    }
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "canrev_acceptance";
    const auto drive_dir = dir / "drive";
    const auto cal_dir = dir / "cal";
    fs::create_directories(drive_dir);
    fs::create_directories(cal_dir);

    const std::string q = "\"";
    auto run = [&](const std::string& args) {
        const std::string cmd = q + cli + q + " " + args + " > /dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };

    if (!run("synth --builtin stop-and-go --seed 7 --out " + q + drive_dir.string() + q)) {
        detail = "synth drive failed";
        return false;
    }
    if (!run("synth --builtin brake-sweep --seed 11 --out " + q + cal_dir.string() + q)) {
        detail = "synth calibration failed";
        return false;
    }

    const std::string inputs = "--can " + q + (drive_dir / "can.log").string() + q + " --imu " + q +
                               (drive_dir / "imu.csv").string() + q + " --gps " + q +
                               (drive_dir / "gps.csv").string() + q + " --cal " + q +
                               (cal_dir / "can.log").string() + q +
                               " --action decelerate --threads 4";
    for (const std::string fmt : {"csv", "json"}) {
        const auto r1 = dir / ("r1." + fmt);
        const auto r2 = dir / ("r2." + fmt);
        if (!run("discover " + inputs + " --format " + fmt + " --out " + q + r1.string() + q) ||
            !run("discover " + inputs + " --format " + fmt + " --out " + q + r2.string() + q)) {
            detail = "discover run failed (" + fmt + ")";
            return false;
        }
        const auto a = read_bytes(r1);
        const auto b = read_bytes(r2);
        if (a.empty() || a != b) {
            detail = fmt + " reports differ or are empty";
            return false;
        }
    }
    detail = "csv and json reports identical across runs";
    return true;
}

template <typename Fn>
void run_criterion(Fn&& fn, const char* name) {
    std::string detail;
    bool ok = false;
    try {
        ok = fn(detail);
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(ok, name, detail);
}

}  // namespace

int main() {
    run_criterion(smooth_arithmetic, "smoothness arithmetic matches transcribed bench rows");
    run_criterion(name_codec, "channel name codec round-trips");
    run_criterion(enumeration_count, "candidate enumeration counts");
    run_criterion(codec_identity, "field encode/extract identity");
    run_criterion(correlation_properties, "correlation properties");

    const auto art = build_sweeps();
    run_criterion([&](std::string& d) { return ground_truth_recovery(art, d); },
                  "synthetic drive control discovery");
    run_criterion([&](std::string& d) { return masking_improvement(art, d); },
                  "stationary masking improves brake correlation");
    run_criterion([&](std::string& d) { return alias_coherence(art, d); },
                  "nested-width aliases track the parent channel");
    run_criterion(cli_determinism, "repeated discovery runs are byte-identical");

    return failures;
}
