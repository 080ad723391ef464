#include <filesystem>
#include <fstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "canrev/ingest.hpp"

using namespace canrev;

namespace {

std::string write_file(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / ("canrev_ingest_" + name);
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path.string();
}

}  // namespace

TEST_CASE("candump lines parse") {
    const auto path = write_file("candump.log",
                                 "(12.500000) can0 0F1#3C00\n"
                                 "(12.520000) can0 0D1#0102030405060708\n"
                                 "(12.510000) vcan1 10E23700#FF\n");
    std::size_t dropped = 0;
    const auto frames = read_can_log(path, &dropped);
    REQUIRE(frames.size() == 3);
    CHECK(dropped == 0);

    CHECK(frames[0].timestamp == 12.5);
    CHECK(frames[0].frame_id == 241);
    CHECK(frames[0].payload == std::vector<std::uint8_t>{0x3C, 0x00});

    // Sorted by timestamp regardless of file order; interface token ignored.
    CHECK(frames[1].frame_id == 0x10E23700);
    CHECK(frames[1].payload.size() == 1);
    CHECK(frames[2].frame_id == 209);
    CHECK(frames[2].payload.size() == 8);
}

TEST_CASE("csv CAN lines parse and mix with candump") {
    const auto path = write_file("mixed.log",
                                 "12.5,241,2,3C00\n"
                                 "(12.6) can0 1F#AB\n"
                                 "13.0,564,8,0011223344556677\n");
    std::size_t dropped = 0;
    const auto frames = read_can_log(path, &dropped);
    REQUIRE(frames.size() == 3);
    CHECK(dropped == 0);
    CHECK(frames[0].frame_id == 241);
    CHECK(frames[1].frame_id == 31);
    CHECK(frames[2].payload.size() == 8);
}

TEST_CASE("malformed CAN lines are counted, never silently lost") {
    const std::string text =
        "(1.0) can0 0F1#3C00\n"
        "garbage\n"
        "\n"
        "2.0,241,3,3C00\n"        // dlc does not match data
        "(3.0) can0 0F1#3C0\n"    // odd hex
        "(x.0) can0 0F1#3C00\n"   // bad timestamp
        "4.0,536870912,1,3C\n"    // id beyond 29 bits
        "(5.0) can0 0F1#\n";      // zero-length payload is valid
    const auto path = write_file("bad.log", text);
    std::size_t dropped = 0;
    const auto frames = read_can_log(path, &dropped);
    CHECK(frames.size() == 2);
    CHECK(dropped == 5);
    // Every non-empty line is either a frame or a counted drop.
    CHECK(frames.size() + dropped == 7);
}

TEST_CASE("imu csv requires its exact header") {
    const auto good = write_file("imu.csv",
                                 "t_s,ax,ay,az\n"
                                 "0.00,0.1,-0.2,9.81\r\n"
                                 "0.01,nope,0,9.81\n"
                                 "0.02,0.3,0.4,9.79\n");
    std::size_t dropped = 0;
    const auto samples = read_imu_csv(good, &dropped);
    REQUIRE(samples.size() == 2);
    CHECK(dropped == 1);
    CHECK(samples[0].ax == 0.1);
    CHECK(samples[0].ay == -0.2);
    CHECK(samples[1].timestamp == 0.02);

    const auto bad = write_file("imu_bad.csv", "time,ax,ay,az\n0,0,0,0\n");
    CHECK_THROWS_AS(read_imu_csv(bad), ParseError);
    const auto empty = write_file("imu_empty.csv", "");
    CHECK_THROWS_AS(read_imu_csv(empty), ParseError);
}

TEST_CASE("imu csv tolerates a UTF-8 BOM and unsorted rows") {
    const auto path = write_file("imu_bom.csv",
                                 "\xEF\xBB\xBFt_s,ax,ay,az\n"
                                 "0.02,1,1,1\n"
                                 "0.01,2,2,2\n");
    const auto samples = read_imu_csv(path);
    REQUIRE(samples.size() == 2);
    CHECK(samples[0].timestamp == 0.01);
    CHECK(samples[1].timestamp == 0.02);
}

TEST_CASE("gps csv accepts velocity-only and position rows") {
    const auto four = write_file("gps4.csv",
                                 "t_s,vx,vy,vz\n"
                                 "0,1.5,0,0\n"
                                 "1,3,4,0\n");
    const auto s4 = read_gps_csv(four);
    REQUIRE(s4.size() == 2);
    CHECK_FALSE(s4[0].has_position);
    CHECK(s4[1].speed() == 5.0);

    const auto seven = write_file("gps7.csv",
                                  "t_s,vx,vy,vz,lat,lon,alt\n"
                                  "0,1,0,0,45.5,-122.6,30.0\n"
                                  "1,1,0,0,45.5,-122.6\n");
    std::size_t dropped = 0;
    const auto s7 = read_gps_csv(seven, &dropped);
    REQUIRE(s7.size() == 1);
    CHECK(dropped == 1);
    CHECK(s7[0].has_position);
    CHECK(s7[0].lat == 45.5);

    const auto bad = write_file("gps_bad.csv", "t,vx,vy,vz\n");
    CHECK_THROWS_AS(read_gps_csv(bad), ParseError);
}

TEST_CASE("missing files raise IoError") {
    CHECK_THROWS_AS(read_can_log("/nonexistent/x.log"), IoError);
    CHECK_THROWS_AS(read_imu_csv("/nonexistent/x.csv"), IoError);
    CHECK_THROWS_AS(read_gps_csv("/nonexistent/x.csv"), IoError);
}

TEST_CASE("load_recording rebases all clocks to the earliest timestamp") {
    const auto can = write_file("rebase_can.log", "(1000.50) can0 0F1#3C00\n(1001.00) can0 0F1#3D00\n");
    const auto imu = write_file("rebase_imu.csv", "t_s,ax,ay,az\n1000.25,0,0,9.81\n1001.25,0,0,9.81\n");
    const auto gps = write_file("rebase_gps.csv", "t_s,vx,vy,vz\n1000.75,1,0,0\n");

    const auto loaded =
        load_recording(can, imu, gps, RecordingKind::drive, true);
    CHECK(loaded.report.frames_read == 2);
    CHECK(loaded.report.imu_read == 2);
    CHECK(loaded.report.gps_read == 1);
    CHECK(loaded.report.clock_rebase_offset == 1000.25);
    CHECK(loaded.recording.imu[0].timestamp == 0.0);
    CHECK(loaded.recording.can[0].timestamp == 0.25);
    CHECK(loaded.recording.gps[0].timestamp == 0.5);
    CHECK(loaded.recording.can[1].timestamp == 0.75);
}

TEST_CASE("load_recording enforces GPS only when masking needs it") {
    const auto can = write_file("nogps_can.log", "(0.0) can0 0F1#3C00\n");
    const auto imu = write_file("nogps_imu.csv", "t_s,ax,ay,az\n0,0,0,9.81\n");

    CHECK_THROWS_AS(load_recording(can, imu, std::nullopt, RecordingKind::drive, true),
                    AnalysisError);
    CHECK_NOTHROW(load_recording(can, imu, std::nullopt, RecordingKind::drive, false));
    CHECK_NOTHROW(load_recording(can, imu, std::nullopt, RecordingKind::calibration_brake, true));
}
