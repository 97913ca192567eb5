// jnoise: multi-cycle JPEG compression simulator and compression-history
// forensics (quantization-step estimation, identical-recompression
// detection). Every subcommand writes a run manifest next to its outputs so
// runs are reproducible from the recorded seed and input digests.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jnoise/jnoise.hpp"

namespace fs = std::filesystem;
using namespace jnoise;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitParse = 3;
constexpr int kExitIntegrity = 4;
constexpr int kExitDomain = 5;

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string file_digest_hex(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "unreadable";
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(
                      {reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()})));
    return buf;
}

// One manifest per run: command, tool version, seed, timestamp, input
// digests, and the effective config snapshot.
struct ManifestBuilder {
    KvConfig kv;

    ManifestBuilder(const std::string& command, uint64_t seed) {
        kv.set("command", command);
        kv.set("tool_version", std::string(kVersion));
        kv.set("seed", static_cast<long long>(seed));
        kv.set("timestamp", iso_timestamp());
    }
    void input(const std::string& name, const fs::path& path) {
        kv.set("input." + name, path.string());
        kv.set("digest." + name, file_digest_hex(path));
    }
    void param(const std::string& key, const std::string& v) { kv.set("param." + key, v); }
    void param(const std::string& key, double v) { kv.set("param." + key, v); }
    void param(const std::string& key, long long v) { kv.set("param." + key, v); }
    void write(const fs::path& path) { kv.save(path); }
};

EstimatorConfig load_estimator_config(const std::string& path, int qmax_override,
                                      bool exclude_zero) {
    EstimatorConfig cfg;
    if (!path.empty()) {
        const KvConfig kv = KvConfig::load(path);
        cfg.t_c = kv.get_double_or("t_c", cfg.t_c);
        cfg.t_xi = kv.get_double_or("t_xi", cfg.t_xi);
        cfg.q_max = static_cast<int>(kv.get_int_or("q_max", cfg.q_max));
        cfg.exclude_zero = kv.get_int_or("exclude_zero", 0) != 0;
    }
    if (qmax_override > 0) cfg.q_max = qmax_override;
    if (exclude_zero) cfg.exclude_zero = true;
    cfg.validate();
    return cfg;
}

std::vector<int> parse_int_list(const std::string& csv, const char* what) {
    std::vector<int> out;
    std::string tok;
    std::istringstream in(csv);
    while (std::getline(in, tok, ',')) {
        try {
            out.push_back(std::stoi(tok));
        } catch (...) {
            throw ConfigError(std::string("bad ") + what + " list entry '" + tok + "'");
        }
    }
    if (out.empty()) throw ConfigError(std::string("empty ") + what + " list");
    return out;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const std::string& input, const std::vector<std::string>& table_files,
                 const std::string& out_dir, bool clip, bool level_shift) {
    const PgmImage pgm = read_pgm(input);
    if (pgm.cropped)
        std::cerr << "warning: input " << pgm.stored_width << "x" << pgm.stored_height
                  << " cropped to " << pgm.plane.width() << "x" << pgm.plane.height() << "\n";
    std::vector<QuantTable> tables;
    for (const auto& f : table_files) {
        if (!fs::exists(f)) throw ConfigError("table file not found: " + f);
        tables.push_back(read_table_txt(f));
    }
    CodecOptions opt;
    opt.clip_pixels = clip;
    opt.level_shift = level_shift;
    const CompressionTrace trace = run_cycles(pgm.plane, tables, opt);
    write_trace(trace, out_dir);

    ManifestBuilder manifest("simulate", 0);
    manifest.input("image", input);
    for (size_t i = 0; i < table_files.size(); ++i)
        manifest.input("table" + std::to_string(i + 1), table_files[i]);
    manifest.param("clip", static_cast<long long>(clip));
    manifest.param("level_shift", static_cast<long long>(level_shift));
    manifest.param("cycles", static_cast<long long>(tables.size()));
    manifest.write(fs::path(out_dir) / "run_manifest.txt");

    std::cout << "trace: " << trace.cycles.size() << " cycle(s), " << pgm.plane.width() << "x"
              << pgm.plane.height() << " -> " << out_dir << "\n";
    return kExitOk;
}

int cmd_gen_table(int quality, const std::string& out) {
    const QuantTable t = ijg_luminance_table(quality);
    write_table_txt(out, t);
    ManifestBuilder manifest("gen-table", 0);
    manifest.param("quality", static_cast<long long>(quality));
    manifest.param("min_step", static_cast<long long>(t.min_step()));
    manifest.write(out + ".manifest.txt");
    std::cout << "table QF" << quality << " (min step " << t.min_step() << ") -> " << out << "\n";
    return kExitOk;
}

int cmd_estimate_qstep(const std::string& input, const std::string& mode,
                       const std::string& config_path, int qmax, bool exclude_zero,
                       const std::string& report_path, const std::string& curve_path) {
    const EstimatorConfig cfg = load_estimator_config(config_path, qmax, exclude_zero);
    const PgmImage pgm = read_pgm(input);

    CsvWriter report({"mode", "u", "estimated_q", "low_confidence"});
    if (mode == "pooled") {
        const StepEstimate est = estimate_step(pgm.plane, -1, cfg);
        report.add_row({std::string("pooled"), static_cast<long long>(-1),
                        static_cast<long long>(est.q),
                        static_cast<long long>(est.low_confidence)});
        std::cout << "estimated step: " << est.q
                  << (est.low_confidence ? "  (low confidence)" : "") << "\n";
        if (!curve_path.empty()) {
            CsvWriter curve({"q", "s_var", "is_local_min"});
            for (int q = 1; q <= est.curve.q_max(); ++q)
                curve.add_row({static_cast<long long>(q), est.curve.at(q),
                               static_cast<long long>(est.curve.is_minimum(q))});
            curve.write(curve_path);
        }
    } else if (mode == "per-freq") {
        const TableEstimate est = estimate_table(pgm.plane, cfg, SvarMode::PerFrequency);
        for (int u = 0; u < kBlockArea; ++u)
            report.add_row({std::string("per-freq"), static_cast<long long>(u),
                            static_cast<long long>(est.steps[static_cast<size_t>(u)]),
                            static_cast<long long>(est.low_confidence)});
        std::cout << "estimated table (row-major):\n";
        for (int r = 0; r < kBlockDim; ++r) {
            for (int c = 0; c < kBlockDim; ++c)
                std::cout << est.steps[static_cast<size_t>(r) * kBlockDim + c]
                          << (c + 1 == kBlockDim ? "\n" : " ");
        }
        if (!curve_path.empty()) {
            const VarCurve curve = svar_curve(pgm.plane, -1, cfg.q_max, cfg.exclude_zero);
            CsvWriter cw({"q", "s_var", "is_local_min"});
            for (int q = 1; q <= curve.q_max(); ++q)
                cw.add_row({static_cast<long long>(q), curve.at(q),
                            static_cast<long long>(curve.is_minimum(q))});
            cw.write(curve_path);
        }
    } else {
        throw ConfigError("mode must be pooled or per-freq");
    }
    report.write(report_path);

    ManifestBuilder manifest("estimate-qstep", 0);
    manifest.input("image", input);
    if (!config_path.empty()) manifest.input("config", config_path);
    manifest.param("mode", mode);
    manifest.param("q_max", static_cast<long long>(cfg.q_max));
    manifest.param("t_c", cfg.t_c);
    manifest.param("t_xi", cfg.t_xi);
    manifest.param("exclude_zero", static_cast<long long>(cfg.exclude_zero));
    manifest.write(report_path + ".manifest.txt");
    return kExitOk;
}

int cmd_detect_recompress(const std::string& coeffs_path, const std::string& table_path,
                          const std::string& config_path, const std::string& report_path,
                          const std::string& coeffs_kind) {
    const Plane coeffs = read_plane(coeffs_path);
    const QuantTable table = read_table_txt(table_path);
    DetectorConfig cfg;
    if (!config_path.empty()) {
        const KvConfig kv = KvConfig::load(config_path);
        cfg.threshold = kv.get_double_or("threshold", cfg.threshold);
        const std::string cal_hash = kv.get_string_or("table_hash", "");
        if (!cal_hash.empty() && cal_hash != table_hash_hex(table))
            std::cerr << "warning: threshold was calibrated for a different table (hash "
                      << cal_hash << " vs " << table_hash_hex(table) << ")\n";
    }
    const CoeffKind kind =
        coeffs_kind == "indices" ? CoeffKind::QuantizedIndices : CoeffKind::Dequantized;

    const DetectionReport rep = detect(coeffs, table, cfg, kind);
    CsvWriter csv({"sigma2_all", "verdict", "min_step"});
    csv.add_row({rep.sigma2_all, std::string(verdict_name(rep.verdict)),
                 static_cast<long long>(rep.min_step)});
    csv.write(report_path);

    if (rep.verdict == Verdict::OutOfDomain)
        std::cerr << "warning: table has no unit step (min " << rep.min_step
                  << "); the statistic cannot separate the classes here\n";
    std::cout << "sigma2_all=" << rep.sigma2_all << " verdict=" << verdict_name(rep.verdict)
              << "\n";

    ManifestBuilder manifest("detect-recompress", 0);
    manifest.input("coeffs", coeffs_path);
    manifest.input("table", table_path);
    if (!config_path.empty()) manifest.input("config", config_path);
    manifest.param("threshold", cfg.threshold);
    manifest.param("coeffs_kind", coeffs_kind);
    manifest.write(report_path + ".manifest.txt");
    return kExitOk;
}

int cmd_calibrate_qstep(const std::string& out, const std::string& steps_csv, int images,
                        int size, uint64_t seed, int qmax) {
    const std::vector<int> steps = parse_int_list(steps_csv, "steps");
    const auto training = make_qstep_training_set(steps, images, size, seed);
    const EstimatorConfig cfg = calibrate_thresholds(training, qmax);

    int hits = 0;
    for (const auto& [img, truth] : training)
        if (estimate_step(img, -1, cfg).q == truth) ++hits;
    const double acc = static_cast<double>(hits) / static_cast<double>(training.size());

    KvConfig kv;
    kv.set("t_c", cfg.t_c);
    kv.set("t_xi", cfg.t_xi);
    kv.set("q_max", static_cast<long long>(cfg.q_max));
    kv.set("exclude_zero", static_cast<long long>(cfg.exclude_zero ? 1 : 0));
    kv.set("training_accuracy", acc);
    kv.save(out);

    ManifestBuilder manifest("calibrate-qstep", seed);
    manifest.param("steps", steps_csv);
    manifest.param("images_per_step", static_cast<long long>(images));
    manifest.param("size", static_cast<long long>(size));
    manifest.param("t_c", cfg.t_c);
    manifest.param("t_xi", cfg.t_xi);
    manifest.param("training_accuracy", acc);
    manifest.write(out + ".manifest.txt");

    std::cout << "T_c=" << cfg.t_c << " T_xi=" << cfg.t_xi << " training accuracy=" << acc
              << " -> " << out << "\n";
    return kExitOk;
}

int cmd_calibrate_detector(const std::string& out, int quality, const std::string& table_path,
                           int pairs, int size, uint64_t seed, int threads) {
    const QuantTable table =
        table_path.empty() ? ijg_luminance_table(quality) : read_table_txt(table_path);
    if (!table.has_unit_step())
        std::cerr << "warning: table has no unit step; calibration runs but the detector "
                     "will report OUT_OF_DOMAIN\n";
    auto [single, dbl] = detector_stat_pairs(table, size, pairs, seed, threads);
    const CalibrationResult cal = calibrate_threshold(single, dbl);

    KvConfig kv;
    kv.set("threshold", cal.config.threshold);
    kv.set("balanced_accuracy", cal.balanced_accuracy);
    kv.set("table_hash", table_hash_hex(table));
    kv.set("min_step", static_cast<long long>(table.min_step()));
    if (table_path.empty()) kv.set("quality", static_cast<long long>(quality));
    kv.save(out);

    ManifestBuilder manifest("calibrate-detector", seed);
    if (!table_path.empty()) manifest.input("table", table_path);
    manifest.param("quality", static_cast<long long>(table_path.empty() ? quality : 0));
    manifest.param("pairs", static_cast<long long>(pairs));
    manifest.param("size", static_cast<long long>(size));
    manifest.param("threshold", cal.config.threshold);
    manifest.param("balanced_accuracy", cal.balanced_accuracy);
    manifest.write(out + ".manifest.txt");

    std::cout << "T=" << cal.config.threshold << " balanced accuracy=" << cal.balanced_accuracy
              << " -> " << out << "\n";
    return kExitOk;
}

int cmd_validate_model(const std::string& out, int images, int size, uint64_t seed, double alpha,
                       const std::string& trace_dir) {
    std::vector<CheckRow> rows;

    if (!trace_dir.empty()) {
        // Integrity audit of a stored trace instead of the synthetic corpus.
        const CompressionTrace trace = read_trace(trace_dir);
        const auto violations = trace_integrity_violations(trace);
        rows.push_back({"trace_integrity", static_cast<double>(violations.size()), 0.0,
                        violations.empty(),
                        violations.empty() ? "" : violations.front()});
    } else {
        const std::vector<Plane> corpus = make_corpus(images, size, size, seed);
        const std::vector<QuantTable> mixed = {QuantTable::uniform(5), QuantTable::uniform(3),
                                               QuantTable::uniform(5)};
        for (auto& r : check_noise_identities(corpus, mixed)) rows.push_back(r);
        for (auto& r : check_support_bounds(corpus, mixed)) rows.push_back(r);
        for (int q : {4, 10, 16}) rows.push_back(check_dc_uniform_variance(corpus, q));
        rows.push_back(check_first_cycle_rounding_fit(corpus, ijg_luminance_table(85), alpha));
        rows.push_back(check_higher_cycle_gaussian(corpus, {4, 2}, alpha));
        rows.push_back(check_higher_cycle_qgaussian(corpus, {4, 1}, alpha));
        rows.push_back(check_rounding_inherited(corpus, 4, 2, alpha));
        rows.push_back(check_higher_cycle_gaussian(corpus, {8, 4, 2}, alpha));
        rows.push_back(check_higher_cycle_qgaussian(corpus, {4, 2, 1}, alpha));
        rows.push_back(check_rounding_inherited(corpus, 4, 3, alpha));
    }

    CsvWriter csv({"name", "statistic", "threshold", "verdict"});
    bool all_pass = true;
    for (const auto& r : rows) {
        csv.add_row({r.name, r.statistic, r.threshold,
                     std::string(r.pass ? "pass" : "FAIL")});
        all_pass = all_pass && r.pass;
        std::cout << (r.pass ? "[pass] " : "[FAIL] ") << r.name << " statistic=" << r.statistic
                  << " threshold=" << r.threshold << "\n";
    }
    csv.write(out);

    ManifestBuilder manifest("validate-model", seed);
    if (!trace_dir.empty()) manifest.param("trace", trace_dir);
    manifest.param("images", static_cast<long long>(images));
    manifest.param("size", static_cast<long long>(size));
    manifest.param("alpha", alpha);
    manifest.write(out + ".manifest.txt");

    if (!all_pass) std::cerr << "warning: some checks failed (see " << out << ")\n";
    return all_pass ? kExitOk : kExitIntegrity;
}

int cmd_benchmark(const std::string& kind, const std::string& sizes_csv,
                  const std::string& steps_csv, const std::string& qualities_csv, int images,
                  uint64_t seed, const std::string& out, int threads,
                  const std::string& config_path) {
    const std::vector<int> sizes = parse_int_list(sizes_csv, "sizes");
    if (images < 10)
        std::cerr << "warning: corpus of " << images
                  << " images per cell is small; accuracy estimates will be coarse\n";

    if (kind == "qstep") {
        const std::vector<int> steps = parse_int_list(steps_csv, "steps");
        EstimatorConfig cfg = load_estimator_config(config_path, 0, false);
        const QstepBenchmark bench =
            run_qstep_benchmark(sizes, steps, images, seed, cfg, threads);
        CsvWriter csv({"size", "step", "accuracy", "images"});
        for (size_t si = 0; si < sizes.size(); ++si)
            for (size_t qi = 0; qi < steps.size(); ++qi)
                csv.add_row({static_cast<long long>(sizes[si]), static_cast<long long>(steps[qi]),
                             bench.accuracy[si][qi], static_cast<long long>(images)});
        csv.write(out);
        for (size_t si = 0; si < sizes.size(); ++si)
            std::cout << "size " << sizes[si]
                      << ": mean accuracy=" << bench.mean_accuracy_for_size(si) << "\n";
    } else if (kind == "detector") {
        const std::vector<int> qualities = parse_int_list(qualities_csv, "qualities");
        DetectorConfig cfg;
        if (!config_path.empty()) {
            const KvConfig kv = KvConfig::load(config_path);
            cfg.threshold = kv.get_double_or("threshold", cfg.threshold);
        }
        const DetectorBenchmark bench =
            run_detector_benchmark(sizes, qualities, images, seed, cfg, threads);
        CsvWriter csv({"size", "quality", "min_step", "balanced_accuracy", "mean_sigma2_single",
                       "mean_sigma2_double", "out_of_domain"});
        for (const DetectorCell& c : bench.cells) {
            csv.add_row({static_cast<long long>(c.size), static_cast<long long>(c.quality),
                         static_cast<long long>(c.min_step), c.balanced_accuracy,
                         c.mean_sigma2_single, c.mean_sigma2_double,
                         static_cast<long long>(c.out_of_domain)});
            std::cout << "size " << c.size << " QF" << c.quality
                      << (c.out_of_domain ? " [out of domain]" : "")
                      << " balanced accuracy=" << c.balanced_accuracy << "\n";
        }
        csv.write(out);
    } else {
        throw ConfigError("benchmark kind must be qstep or detector");
    }

    ManifestBuilder manifest("benchmark", seed);
    if (!config_path.empty()) manifest.input("config", config_path);
    manifest.param("kind", kind);
    manifest.param("sizes", sizes_csv);
    manifest.param("steps", steps_csv);
    manifest.param("qualities", qualities_csv);
    manifest.param("images", static_cast<long long>(images));
    manifest.param("threads", static_cast<long long>(threads));
    manifest.write(out + ".manifest.txt");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"JPEG noise analysis: multi-cycle simulation, quantization-step estimation, "
                 "identical-recompression detection"};
    app.require_subcommand(1);

    // simulate
    std::string sim_input, sim_out;
    std::vector<std::string> sim_tables;
    bool sim_clip = false, sim_shift = false;
    auto* sim = app.add_subcommand("simulate", "Run K compression cycles and dump the trace");
    sim->add_option("--input", sim_input, "input PGM image")->required();
    sim->add_option("--tables", sim_tables, "one table file per cycle")->required()->expected(-1);
    sim->add_option("--out", sim_out, "output trace directory")->required();
    sim->add_flag("--clip", sim_clip, "clamp decoded pixels to [0,255]");
    sim->add_flag("--level-shift", sim_shift, "subtract 128 before the DCT");

    // gen-table
    int gt_quality = 95;
    std::string gt_out;
    auto* gt = app.add_subcommand("gen-table", "Write an IJG-style luminance table");
    gt->add_option("--quality", gt_quality, "IJG quality factor 1..100")->required();
    gt->add_option("--out", gt_out, "output table file")->required();

    // estimate-qstep
    std::string eq_input, eq_mode = "pooled", eq_config, eq_report = "qstep_report.csv",
                eq_curve;
    int eq_qmax = 0;
    bool eq_exclude = false;
    auto* eq = app.add_subcommand("estimate-qstep",
                                  "Estimate first-cycle quantization step(s) from a "
                                  "decompressed image");
    eq->add_option("--input", eq_input, "decompressed PGM image")->required();
    eq->add_option("--mode", eq_mode, "pooled|per-freq")->check(CLI::IsMember({"pooled", "per-freq"}));
    eq->add_option("--qmax", eq_qmax, "search ceiling (default from config, else 64)");
    eq->add_option("--config", eq_config, "thresholds config (t_c, t_xi, q_max)");
    eq->add_option("--report", eq_report, "output CSV report");
    eq->add_option("--emit-curve", eq_curve, "write the pooled S^var(q) curve CSV");
    eq->add_flag("--exclude-zero", eq_exclude, "drop zero dequantized coefficients");

    // detect-recompress
    std::string dr_coeffs, dr_table, dr_config, dr_report = "detect_report.csv",
                dr_kind = "dequantized";
    auto* dr = app.add_subcommand("detect-recompress",
                                  "Single vs identical-double compression from coefficients");
    dr->add_option("--coeffs", dr_coeffs, "coefficient plane file")->required();
    dr->add_option("--table", dr_table, "quantization table file")->required();
    dr->add_option("--config", dr_config, "detector config (threshold)");
    dr->add_option("--report", dr_report, "output CSV report");
    dr->add_option("--coeffs-are", dr_kind, "dequantized|indices")
        ->check(CLI::IsMember({"dequantized", "indices"}));

    // calibrate-qstep
    std::string cq_out = "thresholds.toml", cq_steps = "1,2,3,4,5,6,7,10,13";
    int cq_images = 24, cq_size = 128, cq_qmax = 64;
    uint64_t cq_seed = 1;
    auto* cq = app.add_subcommand("calibrate-qstep",
                                  "Grid-search estimator thresholds on synthetic training data");
    cq->add_option("--out", cq_out, "output config file");
    cq->add_option("--steps", cq_steps, "true steps (must include 1 and 2)");
    cq->add_option("--images", cq_images, "images per step");
    cq->add_option("--size", cq_size, "training image side");
    cq->add_option("--seed", cq_seed, "RNG seed");
    cq->add_option("--qmax", cq_qmax, "search ceiling");

    // calibrate-detector
    std::string cd_out = "detector.toml", cd_table;
    int cd_quality = 100, cd_pairs = 50, cd_size = 128, cd_threads = default_threads();
    uint64_t cd_seed = 1;
    auto* cd = app.add_subcommand("calibrate-detector",
                                  "Choose the detector threshold on synthetic training pairs");
    cd->add_option("--out", cd_out, "output config file");
    cd->add_option("--quality", cd_quality, "IJG quality factor for the table");
    cd->add_option("--table", cd_table, "explicit table file (overrides --quality)");
    cd->add_option("--pairs", cd_pairs, "training pairs");
    cd->add_option("--size", cd_size, "training image side");
    cd->add_option("--seed", cd_seed, "RNG seed");
    cd->add_option("--threads", cd_threads, "worker threads");

    // validate-model
    std::string vm_out = "validation.csv", vm_trace;
    int vm_images = 30, vm_size = 256;
    uint64_t vm_seed = 7;
    double vm_alpha = 0.01;
    auto* vm = app.add_subcommand("validate-model",
                                  "Check the noise identities, bounds and distribution "
                                  "propositions on a synthetic corpus");
    vm->add_option("--out", vm_out, "output CSV report");
    vm->add_option("--images", vm_images, "corpus size");
    vm->add_option("--size", vm_size, "image side");
    vm->add_option("--seed", vm_seed, "RNG seed");
    vm->add_option("--alpha", vm_alpha, "fit significance level");
    vm->add_option("--trace", vm_trace, "audit an existing trace directory instead");

    // benchmark
    std::string bm_kind, bm_sizes = "256,128,64,32", bm_steps = "1,2,3,4,5,6,7,10,13",
                bm_qualities = "100,98,96,92", bm_out = "benchmark.csv", bm_config;
    int bm_images = 50, bm_threads = default_threads();
    uint64_t bm_seed = 99;
    auto* bm = app.add_subcommand("benchmark", "Accuracy matrices over sizes and steps/QFs");
    bm->add_option("--kind", bm_kind, "qstep|detector")
        ->required()
        ->check(CLI::IsMember({"qstep", "detector"}));
    bm->add_option("--sizes", bm_sizes, "comma list of image sides");
    bm->add_option("--steps", bm_steps, "qstep: comma list of true steps");
    bm->add_option("--qualities", bm_qualities, "detector: comma list of QFs");
    bm->add_option("--images", bm_images, "images (or pairs) per cell");
    bm->add_option("--seed", bm_seed, "RNG seed");
    bm->add_option("--out", bm_out, "output CSV");
    bm->add_option("--threads", bm_threads, "worker threads");
    bm->add_option("--config", bm_config, "estimator/detector config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_input, sim_tables, sim_out, sim_clip, sim_shift);
        if (gt->parsed()) return cmd_gen_table(gt_quality, gt_out);
        if (eq->parsed())
            return cmd_estimate_qstep(eq_input, eq_mode, eq_config, eq_qmax, eq_exclude,
                                      eq_report, eq_curve);
        if (dr->parsed())
            return cmd_detect_recompress(dr_coeffs, dr_table, dr_config, dr_report, dr_kind);
        if (cq->parsed())
            return cmd_calibrate_qstep(cq_out, cq_steps, cq_images, cq_size, cq_seed, cq_qmax);
        if (cd->parsed())
            return cmd_calibrate_detector(cd_out, cd_quality, cd_table, cd_pairs, cd_size,
                                          cd_seed, cd_threads);
        if (vm->parsed())
            return cmd_validate_model(vm_out, vm_images, vm_size, vm_seed, vm_alpha, vm_trace);
        if (bm->parsed())
            return cmd_benchmark(bm_kind, bm_sizes, bm_steps, bm_qualities, bm_images, bm_seed,
                                 bm_out, bm_threads, bm_config);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const IntegrityError& e) {
        std::cerr << "integrity error: " << e.what() << "\n";
        return kExitIntegrity;
    } catch (const ShapeError& e) {
        std::cerr << "shape error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitConfig;
}
