#pragma once

#include <filesystem>
#include <string>

#include "jnoise/codec.hpp"
#include "jnoise/config.hpp"
#include "jnoise/plane_io.hpp"

namespace jnoise {

// On-disk trace layout (documented in the README):
//   manifest.txt                 cycles, dimensions, codec flags
//   source.plane                 int32 source image
//   cycleK.table.txt             64 steps, row-major
//   cycleK.{Y,Ytilde,Xtilde,Xnext}.plane
//   cycleK.noise.{quant,round,aux_spatial,aux_dct}.plane
// K is 1-based. All planes are float64 except the integer source/Xnext.

inline void write_trace(const CompressionTrace& trace, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    KvConfig manifest;
    manifest.set("format", std::string("jnoise-trace-v1"));
    manifest.set("cycles", static_cast<long long>(trace.cycles.size()));
    manifest.set("width", static_cast<long long>(trace.source.width()));
    manifest.set("height", static_cast<long long>(trace.source.height()));
    const CodecOptions opt = trace.cycles.empty() ? CodecOptions{} : trace.cycles[0].options;
    manifest.set("clip_pixels", static_cast<long long>(opt.clip_pixels ? 1 : 0));
    manifest.set("level_shift", static_cast<long long>(opt.level_shift ? 1 : 0));
    manifest.save(dir / "manifest.txt");

    write_plane(dir / "source.plane", trace.source, PlaneDType::Int32);
    for (size_t k = 0; k < trace.cycles.size(); ++k) {
        const std::string p = "cycle" + std::to_string(k + 1);
        const CycleRecord& rec = trace.cycles[k];
        write_table_txt(dir / (p + ".table.txt"), rec.table);
        write_plane(dir / (p + ".Y.plane"), rec.Y);
        write_plane(dir / (p + ".Ytilde.plane"), rec.Ytilde);
        write_plane(dir / (p + ".Xtilde.plane"), rec.Xtilde);
        write_plane(dir / (p + ".Xnext.plane"), rec.Xnext, PlaneDType::Int32);
        const NoiseSet& n = trace.noises[k];
        write_plane(dir / (p + ".noise.quant.plane"), n.quant_noise);
        write_plane(dir / (p + ".noise.round.plane"), n.round_noise);
        write_plane(dir / (p + ".noise.aux_spatial.plane"), n.aux_spatial);
        write_plane(dir / (p + ".noise.aux_dct.plane"), n.aux_dct);
    }
}

inline CompressionTrace read_trace(const std::filesystem::path& dir) {
    const KvConfig manifest = KvConfig::load(dir / "manifest.txt");
    if (manifest.get_string_or("format", "") != "jnoise-trace-v1")
        throw ParseError("trace: unknown manifest format");
    const auto cycles = manifest.get_int("cycles");
    if (cycles < 1 || cycles > 1024) throw ParseError("trace: implausible cycle count");

    CompressionTrace trace;
    trace.source = read_plane(dir / "source.plane");
    CodecOptions opt;
    opt.clip_pixels = manifest.get_int_or("clip_pixels", 0) != 0;
    opt.level_shift = manifest.get_int_or("level_shift", 0) != 0;
    for (long long k = 1; k <= cycles; ++k) {
        const std::string p = "cycle" + std::to_string(k);
        CycleRecord rec;
        rec.table = read_table_txt(dir / (p + ".table.txt"));
        rec.options = opt;
        rec.Y = read_plane(dir / (p + ".Y.plane"));
        rec.Ytilde = read_plane(dir / (p + ".Ytilde.plane"));
        rec.Xtilde = read_plane(dir / (p + ".Xtilde.plane"));
        rec.Xnext = read_plane(dir / (p + ".Xnext.plane"));
        NoiseSet n;
        n.quant_noise = read_plane(dir / (p + ".noise.quant.plane"));
        n.round_noise = read_plane(dir / (p + ".noise.round.plane"));
        n.aux_spatial = read_plane(dir / (p + ".noise.aux_spatial.plane"));
        n.aux_dct = read_plane(dir / (p + ".noise.aux_dct.plane"));
        trace.cycles.push_back(std::move(rec));
        trace.noises.push_back(std::move(n));
    }
    return trace;
}

}  // namespace jnoise
