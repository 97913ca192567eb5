#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "jnoise/core.hpp"
#include "jnoise/quant.hpp"

namespace jnoise {

// Flat binary plane container:
//   bytes 0..3   magic "JNPL"
//   byte  4      dtype: 1 = int32, 2 = float64
//   bytes 5..7   reserved (zero)
//   bytes 8..11  width,  u32 little-endian
//   bytes 12..15 height, u32 little-endian
//   payload      row-major samples, little-endian
enum class PlaneDType : uint8_t { Int32 = 1, Float64 = 2 };

namespace detail {

inline void put_u32le(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline uint32_t get_u32le(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

}  // namespace detail

inline std::string encode_plane(const Plane& plane, PlaneDType dtype) {
    if (plane.size() == 0) throw DomainError("encode_plane: zero-size plane rejected");
    std::string out;
    out.reserve(16 + plane.size() * 8);
    out += "JNPL";
    out.push_back(static_cast<char>(dtype));
    out.append(3, '\0');
    detail::put_u32le(out, static_cast<uint32_t>(plane.width()));
    detail::put_u32le(out, static_cast<uint32_t>(plane.height()));
    if (dtype == PlaneDType::Int32) {
        for (double v : plane.samples()) {
            if (v != std::nearbyint(v) || std::abs(v) > 2147483647.0)
                throw DomainError("encode_plane: sample not representable as int32");
            const auto i = static_cast<int32_t>(v);
            const auto u = static_cast<uint32_t>(i);
            detail::put_u32le(out, u);
        }
    } else {
        for (double v : plane.samples()) {
            uint64_t bits;
            std::memcpy(&bits, &v, sizeof bits);
            for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
        }
    }
    return out;
}

inline Plane decode_plane(std::span<const unsigned char> bytes) {
    if (bytes.size() < 16) throw ParseError("plane: truncated header");
    if (std::memcmp(bytes.data(), "JNPL", 4) != 0) throw ParseError("plane: bad magic");
    const auto dtype = bytes[4];
    if (dtype != 1 && dtype != 2) throw ParseError("plane: unknown dtype tag");
    if (bytes[5] || bytes[6] || bytes[7]) throw ParseError("plane: nonzero reserved bytes");
    const uint32_t w = detail::get_u32le(bytes.data() + 8);
    const uint32_t h = detail::get_u32le(bytes.data() + 12);
    if (w == 0 || h == 0) throw ParseError("plane: zero-size plane rejected");
    if (w > (1u << 20) || h > (1u << 20)) throw ParseError("plane: dimensions too large");
    const size_t dsize = dtype == 1 ? 4 : 8;
    const size_t expect = static_cast<size_t>(w) * h * dsize;
    if (bytes.size() - 16 != expect) throw ParseError("plane: payload length mismatch");

    Plane p(static_cast<int>(w), static_cast<int>(h));
    const unsigned char* q = bytes.data() + 16;
    for (double& v : p.samples()) {
        if (dtype == 1) {
            v = static_cast<double>(static_cast<int32_t>(detail::get_u32le(q)));
            q += 4;
        } else {
            uint64_t bits = 0;
            for (int i = 0; i < 8; ++i) bits |= static_cast<uint64_t>(q[i]) << (8 * i);
            std::memcpy(&v, &bits, sizeof v);
            q += 8;
        }
    }
    return p;
}

inline void write_plane(const std::filesystem::path& path, const Plane& plane,
                        PlaneDType dtype = PlaneDType::Float64) {
    const std::string payload = encode_plane(plane, dtype);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("write_plane: cannot open " + path.string());
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw DomainError("write_plane: write failed for " + path.string());
}

inline Plane read_plane(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("read_plane: cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return decode_plane(
            {reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()});
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

/// Quantization table as text: 64 whitespace-separated integers, row-major.
inline QuantTable read_table_txt(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("read_table_txt: cannot open " + path.string());
    std::array<int, kBlockArea> steps{};
    for (int i = 0; i < kBlockArea; ++i)
        if (!(in >> steps[static_cast<size_t>(i)]))
            throw ParseError(path.string() + ": expected 64 integer steps");
    long extra;
    if (in >> extra) throw ParseError(path.string() + ": more than 64 entries");
    try {
        return QuantTable(steps);
    } catch (const DomainError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

inline void write_table_txt(const std::filesystem::path& path, const QuantTable& table) {
    std::ofstream out(path);
    if (!out) throw DomainError("write_table_txt: cannot open " + path.string());
    for (int r = 0; r < kBlockDim; ++r) {
        for (int c = 0; c < kBlockDim; ++c)
            out << table.steps[static_cast<size_t>(r) * kBlockDim + c]
                << (c + 1 == kBlockDim ? "" : " ");
        out << "\n";
    }
    if (!out) throw DomainError("write_table_txt: write failed");
}

}  // namespace jnoise
