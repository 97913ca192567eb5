#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "jnoise/codec.hpp"
#include "jnoise/config.hpp"
#include "jnoise/csv.hpp"
#include "jnoise/jpeg_markers.hpp"
#include "jnoise/pgm.hpp"
#include "jnoise/plane_io.hpp"
#include "jnoise/synth.hpp"
#include "jnoise/trace_io.hpp"

using namespace jnoise;
namespace fs = std::filesystem;

namespace {

const char* kCli = JNOISE_CLI_PATH;

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "jnoise_cli_tests";
    fs::create_directories(dir);
    return dir;
}

int run(const std::string& args) {
    const std::string cmd =
        std::string(kCli) + " " + args + " >" + (work_dir() / "stdout.txt").string() + " 2>" +
        (work_dir() / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string last_stdout() {
    std::ifstream in(work_dir() / "stdout.txt");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// A decompressed PGM whose pixels stay inside [0,255] so no clamping distorts
// the statistics.
fs::path make_compressed_pgm(int side, int q, uint64_t seed, const std::string& name) {
    SynthParams p;
    p.base_lo = 72.0;
    p.base_hi = 184.0;
    p.ac_sigma = 28.0;
    const Plane img = synth_image(side, side, seed, p);
    Plane decoded = encode_decode_cycle(img, QuantTable::uniform(q)).Xnext;
    for (double& v : decoded.samples()) v = std::clamp(v, 0.0, 255.0);
    const fs::path path = work_dir() / name;
    write_pgm(path, decoded);
    return path;
}

}  // namespace

TEST_CASE("gen-table writes the IJG table and a manifest") {
    const fs::path out = work_dir() / "q100.txt";
    REQUIRE(run("gen-table --quality 100 --out " + out.string()) == 0);
    const QuantTable t = read_table_txt(out);
    for (int s : t.steps) CHECK(s == 1);
    CHECK(fs::exists(out.string() + ".manifest.txt"));
    const KvConfig manifest = KvConfig::load(out.string() + ".manifest.txt");
    CHECK(manifest.get_string("command") == "gen-table");
    CHECK(manifest.get_string("tool_version") == kVersion);
}

TEST_CASE("simulate produces a loadable, intact trace") {
    const fs::path img = work_dir() / "in.pgm";
    write_pgm(img, synth_image(32, 32, 901));
    const fs::path table = work_dir() / "q5.txt";
    write_table_txt(table, QuantTable::uniform(5));
    const fs::path out = work_dir() / "trace";

    REQUIRE(run("simulate --input " + img.string() + " --tables " + table.string() + " " +
                table.string() + " --out " + out.string()) == 0);
    const CompressionTrace trace = read_trace(out);
    CHECK(trace.cycles.size() == 2);
    CHECK(trace_integrity_violations(trace).empty());
    CHECK(fs::exists(out / "run_manifest.txt"));
}

TEST_CASE("simulate rejects a missing table file with the config exit code") {
    const fs::path img = work_dir() / "in2.pgm";
    write_pgm(img, synth_image(16, 16, 902));
    CHECK(run("simulate --input " + img.string() + " --tables /nonexistent.txt --out " +
              (work_dir() / "t2").string()) == 2);
}

TEST_CASE("simulate rejects a malformed image with the parse exit code") {
    const fs::path bad = work_dir() / "bad.pgm";
    std::ofstream(bad) << "P5\n8 8\n255\nxx";
    const fs::path table = work_dir() / "q1.txt";
    write_table_txt(table, QuantTable::uniform(1));
    CHECK(run("simulate --input " + bad.string() + " --tables " + table.string() + " --out " +
              (work_dir() / "t3").string()) == 3);
}

TEST_CASE("estimate-qstep recovers the step and emits curve + report") {
    const fs::path img = make_compressed_pgm(128, 5, 903, "est.pgm");
    const fs::path report = work_dir() / "est.csv";
    const fs::path curve = work_dir() / "curve.csv";
    REQUIRE(run("estimate-qstep --input " + img.string() + " --qmax 32 --report " +
                report.string() + " --emit-curve " + curve.string()) == 0);
    CHECK(last_stdout().find("estimated step: 5") != std::string::npos);

    const auto rows = read_csv(report);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"mode", "u", "estimated_q", "low_confidence"});
    CHECK(rows[1][2] == "5");

    const auto curve_rows = read_csv(curve);
    REQUIRE(curve_rows.size() == 33);
    CHECK(curve_rows[0] == std::vector<std::string>{"q", "s_var", "is_local_min"});
    CHECK(curve_rows[5][0] == "5");
    CHECK(curve_rows[5][2] == "1");
    CHECK(fs::exists(report.string() + ".manifest.txt"));
}

TEST_CASE("estimate-qstep per-freq emits 64 rows") {
    const fs::path img = make_compressed_pgm(128, 3, 904, "perfreq.pgm");
    const fs::path report = work_dir() / "perfreq.csv";
    REQUIRE(run("estimate-qstep --input " + img.string() + " --mode per-freq --qmax 16 "
                "--report " + report.string()) == 0);
    const auto rows = read_csv(report);
    CHECK(rows.size() == 65);
}

TEST_CASE("calibrate-qstep writes thresholds that estimate-qstep then uses") {
    const fs::path cfg = work_dir() / "thresholds.toml";
    REQUIRE(run("calibrate-qstep --out " + cfg.string() +
                " --steps 1,2,3,5 --images 4 --size 64 --seed 5") == 0);
    const KvConfig kv = KvConfig::load(cfg);
    CHECK(kv.get_double("t_c") > 0.0);
    CHECK(kv.get_double("t_c") < kv.get_double("t_xi"));
    CHECK(kv.get_double("training_accuracy") >= 0.75);

    const fs::path img = make_compressed_pgm(128, 3, 905, "withcfg.pgm");
    REQUIRE(run("estimate-qstep --input " + img.string() + " --config " + cfg.string() +
                " --qmax 24 --report " + (work_dir() / "withcfg.csv").string()) == 0);
    CHECK(last_stdout().find("estimated step: 3") != std::string::npos);
}

TEST_CASE("detect-recompress classifies and flags out-of-domain tables") {
    const QuantTable unit = ijg_luminance_table(100);
    const Plane img = synth_image(64, 64, 906);
    const CompressionTrace trace = run_cycles(img, {unit, unit});

    const fs::path table = work_dir() / "unit.txt";
    write_table_txt(table, unit);
    const fs::path coeffs_single = work_dir() / "single.plane";
    write_plane(coeffs_single, trace.cycles[0].Ytilde);
    const fs::path coeffs_double = work_dir() / "double.plane";
    write_plane(coeffs_double, trace.cycles[1].Ytilde);
    const fs::path cfg = work_dir() / "det.toml";
    {
        KvConfig kv;
        kv.set("threshold", 0.057);
        kv.save(cfg);
    }

    const fs::path report = work_dir() / "det.csv";
    REQUIRE(run("detect-recompress --coeffs " + coeffs_single.string() + " --table " +
                table.string() + " --config " + cfg.string() + " --report " + report.string()) ==
            0);
    auto rows = read_csv(report);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][1] == "SINGLE");

    REQUIRE(run("detect-recompress --coeffs " + coeffs_double.string() + " --table " +
                table.string() + " --config " + cfg.string() + " --report " + report.string()) ==
            0);
    rows = read_csv(report);
    CHECK(rows[1][1] == "IDENTICAL_DOUBLE");

    // out-of-domain: all steps >= 2, exit still 0, verdict reported
    const QuantTable q2 = QuantTable::uniform(2);
    const fs::path table2 = work_dir() / "q2.txt";
    write_table_txt(table2, q2);
    const CycleRecord rec2 = encode_decode_cycle(img, q2);
    const fs::path coeffs2 = work_dir() / "ood.plane";
    write_plane(coeffs2, rec2.Ytilde);
    REQUIRE(run("detect-recompress --coeffs " + coeffs2.string() + " --table " +
                table2.string() + " --report " + report.string()) == 0);
    rows = read_csv(report);
    CHECK(rows[1][1] == "OUT_OF_DOMAIN");
    CHECK(rows[1][2] == "2");
}

TEST_CASE("detect-recompress flags inconsistent coefficients as integrity errors") {
    Plane coeffs(8, 8, 0.0);
    coeffs.at(0, 1) = 5.0;
    const fs::path plane = work_dir() / "badcoeffs.plane";
    write_plane(plane, coeffs);
    const fs::path table = work_dir() / "q3.txt";
    write_table_txt(table, QuantTable::uniform(3));
    CHECK(run("detect-recompress --coeffs " + plane.string() + " --table " + table.string() +
              " --report " + (work_dir() / "bad.csv").string()) == 4);
}

TEST_CASE("calibrate-detector produces a usable threshold file") {
    const fs::path cfg = work_dir() / "detector.toml";
    REQUIRE(run("calibrate-detector --out " + cfg.string() +
                " --quality 100 --pairs 12 --size 64 --seed 3 --threads 2") == 0);
    const KvConfig kv = KvConfig::load(cfg);
    const double t = kv.get_double("threshold");
    CHECK(t > 0.0);
    CHECK(t < 1.0 / 12.0);
    CHECK(kv.get_double("balanced_accuracy") >= 0.9);
    CHECK(kv.get_int("min_step") == 1);
    CHECK(kv.get_string("table_hash").size() == 16);
}

TEST_CASE("validate-model emits one row per check and is byte-deterministic") {
    const fs::path out1 = work_dir() / "validation1.csv";
    const fs::path out2 = work_dir() / "validation2.csv";
    const std::string args = " --images 6 --size 256 --seed 11";
    REQUIRE(run("validate-model --out " + out1.string() + args) == 0);
    REQUIRE(run("validate-model --out " + out2.string() + args) == 0);
    CHECK(slurp(out1) == slurp(out2));

    const auto rows = read_csv(out1);
    REQUIRE(rows.size() > 10);
    CHECK(rows[0] == std::vector<std::string>{"name", "statistic", "threshold", "verdict"});
    for (size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][3] == "pass");
}

TEST_CASE("validate-model audits a tampered trace") {
    const fs::path img = work_dir() / "vt.pgm";
    write_pgm(img, synth_image(16, 16, 907));
    const fs::path table = work_dir() / "vq4.txt";
    write_table_txt(table, QuantTable::uniform(4));
    const fs::path dir = work_dir() / "vtrace";
    REQUIRE(run("simulate --input " + img.string() + " --tables " + table.string() + " --out " +
                dir.string()) == 0);

    // intact trace passes
    REQUIRE(run("validate-model --trace " + dir.string() + " --out " +
                (work_dir() / "audit_ok.csv").string()) == 0);

    // tamper: Ytilde no longer a multiple of its step
    CompressionTrace trace = read_trace(dir);
    trace.cycles[0].Ytilde.at(0, 0) += 1.0;
    write_trace(trace, dir);
    CHECK(run("validate-model --trace " + dir.string() + " --out " +
              (work_dir() / "audit_bad.csv").string()) == 4);
    const auto rows = read_csv(work_dir() / "audit_bad.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][0] == "trace_integrity");
    CHECK(rows[1][3] == "FAIL");
}

TEST_CASE("benchmark qstep writes the accuracy matrix") {
    const fs::path out = work_dir() / "bench.csv";
    REQUIRE(run("benchmark --kind qstep --sizes 64,32 --steps 1,3 --images 4 --seed 13 "
                "--threads 2 --out " + out.string()) == 0);
    const auto rows = read_csv(out);
    REQUIRE(rows.size() == 5);  // header + 2 sizes x 2 steps
    CHECK(rows[0][0] == "size");
    CHECK(fs::exists(out.string() + ".manifest.txt"));
}

TEST_CASE("benchmark detector reports out-of-domain cells") {
    const fs::path out = work_dir() / "benchdet.csv";
    REQUIRE(run("benchmark --kind detector --sizes 32 --qualities 100,90 --images 6 --seed 17 "
                "--threads 2 --out " + out.string()) == 0);
    const auto rows = read_csv(out);
    REQUIRE(rows.size() == 3);
    // QF100 in-domain, QF90 out-of-domain
    CHECK(rows[1][6] == "0");
    CHECK(rows[2][6] == "1");
}

TEST_CASE("unknown arguments exit with the config code") {
    CHECK(run("no-such-command") == 2);
    CHECK(run("estimate-qstep") == 2);  // missing required --input
}

TEST_CASE("calibrate-qstep rejects a training set without classes 1 and 2") {
    CHECK(run("calibrate-qstep --out " + (work_dir() / "never.toml").string() +
              " --steps 3,5 --images 2 --size 32") == 2);
}
