#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

#include "jnoise/core.hpp"

namespace jnoise {

struct PgmImage {
    Plane plane;
    int maxval = 255;
    // Set when the stored dimensions were not multiples of 8 and the plane is
    // the centered 8-aligned crop.
    bool cropped = false;
    int stored_width = 0;
    int stored_height = 0;
};

namespace detail {

// Next whitespace-delimited token, skipping '#' comment lines. Bounded so a
// hostile stream cannot run away.
inline std::string pgm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(c));
        if (tok.size() > 32) throw ParseError("pgm: oversized header token");
    }
    if (tok.empty()) throw ParseError("pgm: unexpected end of header");
    return tok;
}

inline long pgm_int(std::istream& in, const char* what) {
    const std::string tok = pgm_token(in);
    long v = 0;
    for (char ch : tok) {
        if (!std::isdigit(static_cast<unsigned char>(ch)))
            throw ParseError(std::string("pgm: malformed ") + what);
        v = v * 10 + (ch - '0');
        if (v > 1'000'000'000) throw ParseError(std::string("pgm: absurd ") + what);
    }
    return v;
}

}  // namespace detail

/// Read a P2 (ascii) or P5 (binary) PGM. Dimensions not divisible by 8 are
/// center-cropped to the largest 8-aligned region, recorded via `cropped`.
inline PgmImage read_pgm(std::istream& in) {
    const std::string magic = detail::pgm_token(in);
    if (magic != "P2" && magic != "P5") throw ParseError("pgm: not a P2/P5 file");
    const bool binary = magic == "P5";
    const long w = detail::pgm_int(in, "width");
    const long h = detail::pgm_int(in, "height");
    const long maxval = detail::pgm_int(in, "maxval");
    if (w <= 0 || h <= 0) throw ParseError("pgm: non-positive dimensions");
    if (w > 1 << 16 || h > 1 << 16) throw ParseError("pgm: dimensions too large");
    if (maxval <= 0 || maxval > 65535) throw ParseError("pgm: maxval out of range");

    Plane full(static_cast<int>(w), static_cast<int>(h));
    if (binary) {
        // Exactly one whitespace byte separates the header from the payload.
        const int bytes = maxval > 255 ? 2 : 1;
        std::string buf(static_cast<size_t>(w) * h * bytes, '\0');
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() != static_cast<std::streamsize>(buf.size()))
            throw ParseError("pgm: truncated payload");
        size_t i = 0;
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                unsigned v = static_cast<unsigned char>(buf[i++]);
                if (bytes == 2) v = (v << 8) | static_cast<unsigned char>(buf[i++]);
                if (v > static_cast<unsigned>(maxval)) throw ParseError("pgm: sample > maxval");
                full.at(r, c) = static_cast<double>(v);
            }
    } else {
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                const long v = detail::pgm_int(in, "sample");
                if (v > maxval) throw ParseError("pgm: sample > maxval");
                full.at(r, c) = static_cast<double>(v);
            }
    }

    PgmImage out;
    out.maxval = static_cast<int>(maxval);
    out.stored_width = static_cast<int>(w);
    out.stored_height = static_cast<int>(h);
    const int w8 = static_cast<int>(w) / kBlockDim * kBlockDim;
    const int h8 = static_cast<int>(h) / kBlockDim * kBlockDim;
    if (w8 == 0 || h8 == 0) throw ParseError("pgm: image smaller than one 8x8 block");
    if (w8 == w && h8 == h) {
        out.plane = std::move(full);
    } else {
        out.cropped = true;
        const int ro = (static_cast<int>(h) - h8) / 2, co = (static_cast<int>(w) - w8) / 2;
        Plane crop(w8, h8);
        for (int r = 0; r < h8; ++r)
            for (int c = 0; c < w8; ++c)
                crop.at(r, c) = full.at(r + ro, c + co);
        out.plane = std::move(crop);
    }
    return out;
}

inline PgmImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("pgm: cannot open " + path.string());
    try {
        return read_pgm(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

/// Write a binary (P5) or ascii (P2) PGM. Samples must already be integers
/// in [0, maxval].
inline void write_pgm(std::ostream& out, const Plane& plane, int maxval = 255,
                      bool binary = true) {
    if (maxval <= 0 || maxval > 65535) throw DomainError("write_pgm: maxval out of range");
    for (double v : plane.samples())
        if (v < 0.0 || v > maxval || v != std::nearbyint(v))
            throw DomainError("write_pgm: samples must be integers in [0, maxval]");
    out << (binary ? "P5" : "P2") << "\n"
        << plane.width() << " " << plane.height() << "\n"
        << maxval << "\n";
    if (binary) {
        const int bytes = maxval > 255 ? 2 : 1;
        for (int r = 0; r < plane.height(); ++r)
            for (int c = 0; c < plane.width(); ++c) {
                const unsigned v = static_cast<unsigned>(plane.at(r, c));
                if (bytes == 2) out.put(static_cast<char>((v >> 8) & 0xff));
                out.put(static_cast<char>(v & 0xff));
            }
    } else {
        for (int r = 0; r < plane.height(); ++r) {
            for (int c = 0; c < plane.width(); ++c)
                out << static_cast<long>(plane.at(r, c)) << (c + 1 == plane.width() ? "" : " ");
            out << "\n";
        }
    }
    if (!out) throw DomainError("write_pgm: stream failure");
}

inline void write_pgm(const std::filesystem::path& path, const Plane& plane, int maxval = 255,
                      bool binary = true) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("write_pgm: cannot open " + path.string());
    write_pgm(out, plane, maxval, binary);
}

}  // namespace jnoise
