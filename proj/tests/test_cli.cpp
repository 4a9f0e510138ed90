#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hologen/io.hpp"
#include "hologen/patterns.hpp"
#include "hologen/runner.hpp"

using namespace hologen;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "hologen_cli_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_checker_png(const fs::path& path, int n) {
    RealImage img = patterns::checkerboard(n, n, 2);
    std::vector<uint8_t> px(img.data.size());
    for (size_t i = 0; i < px.size(); ++i) px[i] = img.data[i] > 0.5 ? 255 : 0;
    write_png_gray(path.string(), px, n, n);
}

std::string gs_config(const std::string& out_dir) {
    return R"({
  "schema_version": 1,
  "algorithm": {"kind": "gs", "iterations": 5},
  "slm": {"mode": "phase", "levels": 256},
  "target": {"image": "target.png", "normalization": "max_to_one"},
  "seed": 3,
  "io": {"output_dir": ")" + out_dir + R"("}
})";
}

double parsed_value(const std::string& text, const std::string& key) {
    size_t pos = text.find(key + "=");
    REQUIRE(pos != std::string::npos);
    return std::strtod(text.c_str() + pos + key.size() + 1, nullptr);
}

std::map<std::string, std::string> artifact_bytes(const fs::path& dir) {
    std::map<std::string, std::string> bytes;
    for (const auto& entry : fs::directory_iterator(dir))
        bytes[entry.path().filename().string()] = read_text_file(entry.path().string());
    return bytes;
}

}  // namespace

TEST_CASE("generate runs a config and writes the requested artifacts") {
    fs::path dir = fresh_dir("generate");
    write_checker_png(dir / "target.png", 16);
    write_text_file((dir / "job.json").string(), gs_config("out"));

    std::ostringstream out, err;
    int rc = cmd_generate((dir / "job.json").string(), out, err);
    CAPTURE(err.str());
    REQUIRE(rc == 0);

    CHECK(fs::exists(dir / "out" / "hologram.hgf"));
    CHECK(fs::exists(dir / "out" / "replay.hgf"));
    CHECK(fs::exists(dir / "out" / "hologram.png"));
    CHECK(fs::exists(dir / "out" / "trace.csv"));
    CHECK(!fs::exists(dir / "out" / "replay.png"));

    CHECK(out.str().find("algorithm=gs") != std::string::npos);
    double final_error = parsed_value(out.str(), "final_error");
    CHECK(final_error > 0.0);
    CHECK(final_error < 1.0);

    // The trace artifact is the normative long-format CSV.
    std::string csv = read_text_file((dir / "out" / "trace.csv").string());
    CHECK(csv.rfind("iteration,metric,value\n", 0) == 0);
    CHECK(csv.find(",mse,") != std::string::npos);

    // A second run of the same config reproduces every artifact byte.
    auto first = artifact_bytes(dir / "out");
    std::ostringstream out2, err2;
    REQUIRE(cmd_generate((dir / "job.json").string(), out2, err2) == 0);
    CHECK(artifact_bytes(dir / "out") == first);
}

TEST_CASE("generate writes subframes and their statistic for time-averaged runs") {
    fs::path dir = fresh_dir("generate_ospr");
    write_checker_png(dir / "target.png", 16);
    write_text_file((dir / "job.json").string(), R"({
  "schema_version": 1,
  "algorithm": {"kind": "ospr", "subframes": 3},
  "slm": {"mode": "phase", "levels": 2, "full_circle": false,
          "min_arg": 0.0, "max_arg": 3.141592653589793},
  "target": {"image": "target.png", "normalization": "max_to_one"},
  "seed": 7,
  "io": {"output_dir": "out"}
})");

    std::ostringstream out, err;
    REQUIRE(cmd_generate((dir / "job.json").string(), out, err) == 0);
    CHECK(fs::exists(dir / "out" / "frame_000.hgf"));
    CHECK(fs::exists(dir / "out" / "frame_001.hgf"));
    CHECK(fs::exists(dir / "out" / "frame_002.hgf"));
    CHECK(!fs::exists(dir / "out" / "frame_003.hgf"));
    CHECK(out.str().find("subframe_mse_statistic=") != std::string::npos);
    CHECK(out.str().find("algorithm=ospr") != std::string::npos);
}

TEST_CASE("generate rejects an invalid config without writing anything") {
    fs::path dir = fresh_dir("generate_bad");
    write_checker_png(dir / "target.png", 16);
    std::string bad = gs_config("out_bad");
    bad.replace(bad.find("\"levels\": 256"), 13, "\"levels\": 1");
    write_text_file((dir / "job.json").string(), bad);

    std::ostringstream out, err;
    CHECK(cmd_generate((dir / "job.json").string(), out, err) == 1);
    CHECK(err.str().find("slm.levels") != std::string::npos);
    CHECK(!fs::exists(dir / "out_bad"));

    std::ostringstream out2, err2;
    CHECK(cmd_generate((dir / "nonexistent.json").string(), out2, err2) == 1);
    CHECK(err2.str().find("config error") != std::string::npos);
}

TEST_CASE("batch runs every matching config and reports failures") {
    auto make_batch_dir = [](const std::string& name) {
        fs::path dir = fresh_dir(name);
        write_checker_png(dir / "target.png", 16);
        write_text_file((dir / "a.json").string(), R"({
  "schema_version": 1,
  "algorithm": {"kind": "gs", "iterations": 4},
  "slm": {"mode": "phase", "levels": 256},
  "target": {"image": "target.png", "normalization": "max_to_one"},
  "seed": 1,
  "io": {"output_dir": "out_a"}
})");
        write_text_file((dir / "b.json").string(), R"({
  "schema_version": 1,
  "algorithm": {"kind": "ds", "max_evaluations": 200},
  "slm": {"mode": "phase", "levels": 2, "full_circle": false,
          "min_arg": 0.0, "max_arg": 3.141592653589793},
  "target": {"image": "target.png", "normalization": "max_to_one"},
  "seed": 2,
  "io": {"output_dir": "out_b"}
})");
        write_text_file((dir / "c.json").string(), R"({
  "schema_version": 1,
  "algorithm": {"kind": "gs"},
  "slm": {"mode": "phase", "levels": 1},
  "target": {"image": "target.png", "normalization": "max_to_one"},
  "io": {"output_dir": "out_c"}
})");
        return dir;
    };

    fs::path serial = make_batch_dir("batch_serial");
    std::ostringstream out, err;
    int rc = cmd_batch(serial.string(), "*.json", 1, out, err);
    CHECK(rc == 1); // c.json is invalid

    std::string summary = read_text_file((serial / "batch_summary.csv").string());
    CHECK(summary.rfind("job,status,final_error,seconds,message\n", 0) == 0);
    CHECK(summary.find("a.json,ok,") != std::string::npos);
    CHECK(summary.find("b.json,ok,") != std::string::npos);
    CHECK(summary.find("c.json,failed,") != std::string::npos);
    CHECK(out.str().find("a.json") != std::string::npos);
    CHECK(out.str().find("failed") != std::string::npos);

    CHECK(fs::exists(serial / "a.log"));
    CHECK(fs::exists(serial / "c.log"));
    CHECK(read_text_file((serial / "c.log").string()).find("slm.levels") !=
          std::string::npos);
    CHECK(fs::exists(serial / "out_a" / "hologram.hgf"));
    CHECK(fs::exists(serial / "out_b" / "hologram.hgf"));
    CHECK(!fs::exists(serial / "out_c"));

    // Two workers produce the same artifacts as one.
    fs::path parallel = make_batch_dir("batch_parallel");
    std::ostringstream out2, err2;
    CHECK(cmd_batch(parallel.string(), "*.json", 2, out2, err2) == 1);
    CHECK(artifact_bytes(parallel / "out_a") == artifact_bytes(serial / "out_a"));
    CHECK(artifact_bytes(parallel / "out_b") == artifact_bytes(serial / "out_b"));

    std::ostringstream out3, err3;
    CHECK(cmd_batch(serial.string(), "*.toml", 1, out3, err3) == 1);
    CHECK(err3.str().find("no jobs matched") != std::string::npos);
}

TEST_CASE("metrics compares a field dump against a target image") {
    fs::path dir = fresh_dir("metrics");

    // 4x4 target: top half white, bottom half black. Black and white pixels
    // survive the gray decode and max-to-one normalization exactly.
    std::vector<uint8_t> px(16, 0);
    for (int i = 0; i < 8; ++i) px[i] = 255;
    write_png_gray((dir / "target.png").string(), px, 4, 4);

    // Replay that matches the white half exactly and reads 0.5 in the black
    // half: per-pixel squared error 0 and 0.25, so plain MSE is 0.125.
    ComplexField<double> replay(4, 4, Domain::Replay);
    for (int i = 0; i < 8; ++i) replay.data[i] = {1.0, 0.0};
    for (int i = 8; i < 16; ++i) replay.data[i] = {0.5, 0.0};
    write_field_dump((dir / "replay.hgf").string(), replay);

    // Mask covering only the black half.
    std::vector<uint8_t> mask_px(16, 0);
    for (int i = 8; i < 16; ++i) mask_px[i] = 255;
    write_png_gray((dir / "mask.png").string(), mask_px, 4, 4);

    MetricsRequest req;
    req.target_path = (dir / "target.png").string();
    req.dump_path = (dir / "replay.hgf").string();
    req.want_ssim = true;

    std::ostringstream out, err;
    REQUIRE(cmd_metrics(req, out, err) == 0);
    CHECK(parsed_value(out.str(), "mse") == doctest::Approx(0.125).epsilon(1e-9));
    CHECK(parsed_value(out.str(), "ssim") < 1.0);

    MetricsRequest masked = req;
    masked.mask_path = (dir / "mask.png").string();
    std::ostringstream mout, merr;
    REQUIRE(cmd_metrics(masked, mout, merr) == 0);
    CHECK(parsed_value(mout.str(), "mse") == doctest::Approx(0.25).epsilon(1e-9));

    // A dump of the target itself scores a perfect match.
    RealImage loaded = load_target((dir / "target.png").string(), Normalization::MaxToOne);
    ComplexField<double> self(4, 4, Domain::Replay);
    for (size_t i = 0; i < 16; ++i) self.data[i] = {loaded.data[i], 0.0};
    write_field_dump((dir / "self.hgf").string(), self);
    MetricsRequest selfreq = req;
    selfreq.dump_path = (dir / "self.hgf").string();
    std::ostringstream sout, serr;
    REQUIRE(cmd_metrics(selfreq, sout, serr) == 0);
    CHECK(parsed_value(sout.str(), "mse") == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(parsed_value(sout.str(), "ssim") == doctest::Approx(1.0).epsilon(1e-9));

    // Dimension mismatches are reported, not computed around.
    ComplexField<double> small(2, 2, Domain::Replay);
    write_field_dump((dir / "small.hgf").string(), small);
    MetricsRequest badreq = req;
    badreq.dump_path = (dir / "small.hgf").string();
    std::ostringstream bout, berr;
    CHECK(cmd_metrics(badreq, bout, berr) == 1);
    CHECK(berr.str().find("dimension mismatch") != std::string::npos);
}

TEST_CASE("bench fft subcommand writes the csv it prints") {
    fs::path dir = fresh_dir("bench");
    BenchFftRequest req;
    req.sizes = {64, 128};
    req.runs = 2;
    req.pairs = 2;
    req.csv_path = (dir / "fft.csv").string();

    std::ostringstream out, err;
    REQUIRE(cmd_bench_fft(req, out, err) == 0);
    std::string csv = read_text_file(req.csv_path);
    CHECK(csv == out.str());
    CHECK(csv.rfind("label,resolution,", 0) == 0);
    // Header plus one row per size.
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

    BenchFftRequest bad = req;
    bad.sizes = {100};
    std::ostringstream bout, berr;
    CHECK(cmd_bench_fft(bad, bout, berr) == 1);
    CHECK(berr.str().find("config error") != std::string::npos);
}

TEST_CASE("bench breakdown subcommand prints the fractions") {
    BenchBreakdownRequest req;
    req.algorithm = AlgorithmVariant::Gs;
    req.resolution = 8;
    req.iterations = 5;

    std::ostringstream out, err;
    REQUIRE(cmd_bench_breakdown(req, out, err) == 0);
    CHECK(out.str().find("algorithm=gs") != std::string::npos);
    CHECK(out.str().find("resolution=8") != std::string::npos);
    CHECK(out.str().find("transform_fraction=") != std::string::npos);
    CHECK(out.str().find("constraint_fraction=") != std::string::npos);

    BenchBreakdownRequest bad = req;
    bad.resolution = 1;
    std::ostringstream bout, berr;
    CHECK(cmd_bench_breakdown(bad, bout, berr) == 1);
}
