#pragma once

#include <atomic>
#include <future>
#include <thread>
#include <vector>

#include "jnoise/jpeg_markers.hpp"
#include "jnoise/qstep.hpp"
#include "jnoise/recompress.hpp"
#include "jnoise/synth.hpp"
#include "jnoise/validation.hpp"

namespace jnoise {

/// Run f(i) for i in [0, n) across a small worker pool. Each index owns its
/// results slot, so the output is identical to the sequential order.
template <typename F>
void parallel_for(long long n, int threads, F&& f) {
    if (threads <= 1 || n <= 1) {
        for (long long i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<long long> next{0};
    auto worker = [&] {
        for (long long i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
    };
    std::vector<std::thread> pool;
    const int use = std::min<long long>(threads, n);
    pool.reserve(static_cast<size_t>(use));
    for (int t = 0; t < use; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

inline int default_threads() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// ---------------------------------------------------------------------------
// Step-estimation benchmark: accuracy matrix over image sizes x true steps.
// ---------------------------------------------------------------------------

struct QstepBenchmark {
    std::vector<int> sizes;
    std::vector<int> steps;
    // accuracy[size][step] in [0,1]
    std::vector<std::vector<double>> accuracy;
    int images_per_cell = 0;

    double mean_accuracy_for_size(size_t size_idx) const {
        double acc = 0.0;
        for (double a : accuracy[size_idx]) acc += a;
        return acc / static_cast<double>(accuracy[size_idx].size());
    }
};

/// Singly compress synthetic images at each true step and score Algorithm 1
/// (pooled mode) against the truth. Deterministic per (seed, size, step, i).
inline QstepBenchmark run_qstep_benchmark(const std::vector<int>& sizes,
                                          const std::vector<int>& steps, int images_per_cell,
                                          uint64_t seed, const EstimatorConfig& cfg,
                                          int threads = 1) {
    cfg.validate();
    QstepBenchmark bench;
    bench.sizes = sizes;
    bench.steps = steps;
    bench.images_per_cell = images_per_cell;
    bench.accuracy.assign(sizes.size(), std::vector<double>(steps.size(), 0.0));

    for (size_t si = 0; si < sizes.size(); ++si) {
        const int side = sizes[si];
        for (size_t qi = 0; qi < steps.size(); ++qi) {
            const int qstar = steps[qi];
            std::vector<int> hit(static_cast<size_t>(images_per_cell), 0);
            parallel_for(images_per_cell, threads, [&](long long i) {
                const uint64_t s = Rng::derive_seed(
                    seed, (static_cast<uint64_t>(side) << 40) ^
                              (static_cast<uint64_t>(qstar) << 20) ^ static_cast<uint64_t>(i));
                const Plane img = synth_image(side, side, s);
                const CycleRecord rec = encode_decode_cycle(img, QuantTable::uniform(qstar));
                const StepEstimate est = estimate_step(rec.Xnext, -1, cfg);
                hit[static_cast<size_t>(i)] = est.q == qstar ? 1 : 0;
            });
            int hits = 0;
            for (int h : hit) hits += h;
            bench.accuracy[si][qi] = static_cast<double>(hits) / images_per_cell;
        }
    }
    return bench;
}

/// Deterministic training set for threshold calibration: images_per_step
/// synthetic images per true step, singly compressed, labeled with the step.
inline std::vector<std::pair<Plane, int>> make_qstep_training_set(
    const std::vector<int>& steps, int images_per_step, int side, uint64_t seed) {
    std::vector<std::pair<Plane, int>> out;
    for (int qstar : steps)
        for (int i = 0; i < images_per_step; ++i) {
            const uint64_t s = Rng::derive_seed(
                seed, (static_cast<uint64_t>(qstar) << 32) ^ static_cast<uint64_t>(i));
            const Plane img = synth_image(side, side, s);
            out.emplace_back(encode_decode_cycle(img, QuantTable::uniform(qstar)).Xnext, qstar);
        }
    return out;
}

// ---------------------------------------------------------------------------
// Recompression-detector benchmark.
// ---------------------------------------------------------------------------

struct DetectorCell {
    int size = 0;
    int quality = 0;  // IJG QF; 0 means an explicit table was supplied
    int min_step = 0;
    double balanced_accuracy = 0.0;  // 0.5*(TPR+TNR); NaN-free even out of domain
    double mean_sigma2_single = 0.0;
    double mean_sigma2_double = 0.0;
    bool out_of_domain = false;
};

struct DetectorBenchmark {
    std::vector<DetectorCell> cells;
};

/// Per-image statistic pairs (single vs identical double) for one table.
inline std::pair<std::vector<double>, std::vector<double>> detector_stat_pairs(
    const QuantTable& table, int side, int pairs, uint64_t seed, int threads = 1) {
    std::vector<double> single(static_cast<size_t>(pairs)), dbl(static_cast<size_t>(pairs));
    parallel_for(pairs, threads, [&](long long i) {
        const uint64_t s = Rng::derive_seed(
            seed, (static_cast<uint64_t>(side) << 32) ^ static_cast<uint64_t>(i));
        const Plane img = synth_image(side, side, s);
        const CompressionTrace trace = run_cycles(img, {table, table});
        single[static_cast<size_t>(i)] =
            rounding_noise_stat(trace.cycles[0].Ytilde, table, CoeffKind::Dequantized);
        dbl[static_cast<size_t>(i)] =
            rounding_noise_stat(trace.cycles[1].Ytilde, table, CoeffKind::Dequantized);
    });
    return {std::move(single), std::move(dbl)};
}

/// Score a calibrated detector on fresh pairs at each size/quality. Tables
/// with no unit step score as out-of-domain (accuracy reported from the raw
/// statistic anyway, for the "fails outside the domain" row).
inline DetectorBenchmark run_detector_benchmark(const std::vector<int>& sizes,
                                                const std::vector<int>& qualities, int pairs,
                                                uint64_t seed, const DetectorConfig& cfg,
                                                int threads = 1) {
    DetectorBenchmark bench;
    for (int quality : qualities) {
        const QuantTable table = ijg_luminance_table(quality);
        for (int side : sizes) {
            auto [single, dbl] = detector_stat_pairs(
                table, side, pairs, Rng::derive_seed(seed, static_cast<uint64_t>(quality)),
                threads);
            DetectorCell cell;
            cell.size = side;
            cell.quality = quality;
            cell.min_step = table.min_step();
            cell.out_of_domain = table.min_step() > 1;
            cell.mean_sigma2_single = sample_stats(single).mean;
            cell.mean_sigma2_double = sample_stats(dbl).mean;
            long long tp = 0, tn = 0;
            for (double s : dbl)
                if (s <= cfg.threshold) ++tp;
            for (double s : single)
                if (s > cfg.threshold) ++tn;
            cell.balanced_accuracy =
                0.5 * (static_cast<double>(tp) / pairs + static_cast<double>(tn) / pairs);
            bench.cells.push_back(cell);
        }
    }
    return bench;
}

}  // namespace jnoise
