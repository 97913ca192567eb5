#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "jnoise/quant.hpp"

namespace jnoise {

// Zigzag scan position -> row-major coefficient index (the libjpeg natural
// order). DQT payloads arrive in this order; everything else in the artifact
// is row-major.
inline constexpr std::array<int, kBlockArea> kZigzagToRowMajor = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,
    12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

inline std::array<int, kBlockArea> zigzag_to_rowmajor(const std::array<int, kBlockArea>& zz) {
    std::array<int, kBlockArea> out{};
    for (int i = 0; i < kBlockArea; ++i) out[static_cast<size_t>(kZigzagToRowMajor[i])] = zz[i];
    return out;
}

inline std::array<int, kBlockArea> rowmajor_to_zigzag(const std::array<int, kBlockArea>& rm) {
    std::array<int, kBlockArea> out{};
    for (int i = 0; i < kBlockArea; ++i) out[i] = rm[static_cast<size_t>(kZigzagToRowMajor[i])];
    return out;
}

struct JpegQuantTableEntry {
    int precision = 0;  // 0: 8-bit steps, 1: 16-bit
    int id = 0;         // Tq, 0..3
    QuantTable table;   // row-major
};

struct JpegComponent {
    int id = 0;
    int sampling = 0;  // packed H/V nibbles, kept verbatim
    int quant_table_id = 0;
};

struct JpegHeaderInfo {
    std::vector<JpegQuantTableEntry> quant_tables;
    bool has_frame = false;
    int sample_precision = 0;
    int width = 0;
    int height = 0;
    std::vector<JpegComponent> components;
};

/// Walk the marker segments of a JPEG stream up to SOS: collect every DQT
/// table (de-zigzagged to row-major), the SOF0/SOF2 frame header, and the
/// component -> table mapping. Entropy-coded data is never touched. Any
/// malformed structure raises ParseError; the walk is strictly forward, so
/// no input can loop or overrun.
inline JpegHeaderInfo parse_jpeg_markers(std::span<const unsigned char> bytes) {
    JpegHeaderInfo info;
    size_t pos = 0;
    auto need = [&](size_t n, const char* what) {
        if (pos + n > bytes.size()) throw ParseError(std::string("jpeg: truncated ") + what);
    };
    auto u16 = [&](const char* what) {
        need(2, what);
        const unsigned v = (static_cast<unsigned>(bytes[pos]) << 8) | bytes[pos + 1];
        pos += 2;
        return v;
    };

    need(2, "stream");
    if (bytes[0] != 0xff || bytes[1] != 0xd8) throw ParseError("jpeg: missing SOI marker");
    pos = 2;

    while (true) {
        // Markers may be preceded by fill bytes (0xff padding).
        need(1, "marker");
        if (bytes[pos] != 0xff) throw ParseError("jpeg: expected marker byte 0xff");
        while (pos < bytes.size() && bytes[pos] == 0xff) ++pos;
        need(1, "marker code");
        const unsigned marker = bytes[pos++];

        if (marker == 0xd8) continue;                    // stray SOI
        if (marker == 0x01 || (marker >= 0xd0 && marker <= 0xd7)) continue;  // standalone
        if (marker == 0xd9) break;                       // EOI before SOS: nothing left
        if (marker == 0xda) break;                       // SOS: stop, never decode entropy data

        const unsigned len = u16("segment length");
        if (len < 2) throw ParseError("jpeg: segment length < 2");
        const size_t seg_end = pos + (len - 2);
        if (seg_end > bytes.size()) throw ParseError("jpeg: segment overruns stream");

        if (marker == 0xdb) {  // DQT, possibly several tables in one segment
            while (pos < seg_end) {
                JpegQuantTableEntry entry;
                entry.precision = bytes[pos] >> 4;
                entry.id = bytes[pos] & 0x0f;
                ++pos;
                if (entry.precision > 1) throw ParseError("jpeg: bad DQT precision");
                if (entry.id > 3) throw ParseError("jpeg: bad DQT table id");
                const int step_bytes = entry.precision ? 2 : 1;
                if (pos + static_cast<size_t>(kBlockArea) * step_bytes > seg_end)
                    throw ParseError("jpeg: DQT payload overruns segment");
                std::array<int, kBlockArea> zz{};
                for (int i = 0; i < kBlockArea; ++i) {
                    int v = bytes[pos++];
                    if (step_bytes == 2) v = (v << 8) | bytes[pos++];
                    if (v < 1) throw ParseError("jpeg: DQT step of 0");
                    zz[i] = v;
                }
                entry.table = QuantTable(zigzag_to_rowmajor(zz));
                info.quant_tables.push_back(entry);
            }
            if (pos != seg_end) throw ParseError("jpeg: DQT segment length mismatch");
        } else if (marker == 0xc0 || marker == 0xc2) {  // SOF0 / SOF2
            if (seg_end - pos < 6) throw ParseError("jpeg: SOF too short");
            info.has_frame = true;
            info.sample_precision = bytes[pos++];
            info.height = static_cast<int>((bytes[pos] << 8) | bytes[pos + 1]);
            pos += 2;
            info.width = static_cast<int>((bytes[pos] << 8) | bytes[pos + 1]);
            pos += 2;
            const int nf = bytes[pos++];
            if (nf < 1 || seg_end - pos < static_cast<size_t>(nf) * 3)
                throw ParseError("jpeg: SOF component list malformed");
            for (int i = 0; i < nf; ++i) {
                JpegComponent comp;
                comp.id = bytes[pos];
                comp.sampling = bytes[pos + 1];
                comp.quant_table_id = bytes[pos + 2];
                if (comp.quant_table_id > 3) throw ParseError("jpeg: SOF table id out of range");
                info.components.push_back(comp);
                pos += 3;
            }
            pos = seg_end;
        } else {
            pos = seg_end;  // APPn, COM, other SOFs: skip
        }
        if (pos >= bytes.size()) break;
    }
    return info;
}

// Standard luminance base table (Annex K), row-major.
inline constexpr std::array<int, kBlockArea> kIjgLuminanceBase = {
    16, 11, 10, 16, 24,  40,  51,  61,   //
    12, 12, 14, 19, 26,  58,  60,  55,   //
    14, 13, 16, 24, 40,  57,  69,  56,   //
    14, 17, 22, 29, 51,  87,  80,  62,   //
    18, 22, 37, 56, 68,  109, 103, 77,   //
    24, 35, 55, 64, 81,  104, 113, 92,   //
    49, 64, 78, 87, 103, 121, 120, 101,  //
    72, 92, 95, 98, 112, 100, 103, 99};

/// Luminance table at an IJG quality factor (1..100): base entries scaled by
/// 5000/QF (QF < 50) or 200 - 2 QF, then clamped to [1, 255].
inline QuantTable ijg_luminance_table(int quality) {
    if (quality < 1 || quality > 100) throw ConfigError("ijg_luminance_table: quality in 1..100");
    const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
    QuantTable t;
    for (size_t u = 0; u < kBlockArea; ++u) {
        int v = (kIjgLuminanceBase[u] * scale + 50) / 100;
        v = v < 1 ? 1 : (v > 255 ? 255 : v);
        t.steps[u] = v;
    }
    return t;
}

}  // namespace jnoise
