#pragma once

// .bbmr container: a scale plan plus raw RGB8 low-resolution blocks.
//
//   offset size  field
//        0    4  magic "BBMR"
//        4    1  version (1)
//        5    1  flags (0; reserved for per-block compression)
//        6    4  orig_w, little-endian
//       10    4  orig_h
//       14    2  block_w
//       16    2  block_h
//       18    3  k1, k2, k3
//       21    1  color (0 = RGB8)
//       22    4  n_blocks
//       26    N  plan codes, row-major (0 -> k1, 1 -> k2, 2 -> k3)
//     26+N    P  block payloads, row-major, (block_w/k)*(block_h/k)*3 bytes each
//   26+N+P    4  CRC-32 (IEEE) of plan + payload

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <zlib.h>

#include "bbmr/allocator.hpp"
#include "bbmr/error.hpp"
#include "bbmr/image.hpp"

namespace bbmr {

inline constexpr std::array<std::uint8_t, 4> kMagic{'B', 'B', 'M', 'R'};
inline constexpr std::uint8_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderSize = 26;
inline constexpr std::size_t kCrcSize = 4;

struct ContainerHeader {
    std::uint8_t version = kFormatVersion;
    std::uint8_t flags = 0;
    std::uint32_t orig_w = 0;
    std::uint32_t orig_h = 0;
    std::uint16_t block_w = 0;
    std::uint16_t block_h = 0;
    FactorTriple factors;
    std::uint8_t color = 0;
    std::uint32_t n_blocks = 0;

    friend bool operator==(const ContainerHeader&, const ContainerHeader&) = default;
};

struct Container {
    ContainerHeader header;
    std::vector<Tier> plan;
    std::vector<RasterImage> blocks;

    friend bool operator==(const Container&, const Container&) = default;
};

inline ContainerHeader make_header(const BlockGrid& grid, const FactorTriple& factors) {
    require(grid.block_w <= 0xFFFF && grid.block_h <= 0xFFFF, "block dimensions exceed 16 bits");
    ContainerHeader h;
    h.orig_w = std::uint32_t(grid.orig_w);
    h.orig_h = std::uint32_t(grid.orig_h);
    h.block_w = std::uint16_t(grid.block_w);
    h.block_h = std::uint16_t(grid.block_h);
    h.factors = factors;
    h.n_blocks = std::uint32_t(grid.size());
    return h;
}

inline BlockGrid grid_of(const ContainerHeader& h) {
    return make_grid(int(h.orig_w), int(h.orig_h), h.block_w, h.block_h);
}

namespace detail {

inline std::uint32_t crc32_ieee(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b = {}) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    crc = ::crc32(crc, a.data(), uInt(a.size()));
    if (!b.empty()) crc = ::crc32(crc, b.data(), uInt(b.size()));
    return std::uint32_t(crc);
}

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(std::uint8_t(v));
    out.push_back(std::uint8_t(v >> 8));
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int s = 0; s < 32; s += 8) out.push_back(std::uint8_t(v >> s));
}

inline std::uint16_t get_u16(std::span<const std::uint8_t> in, std::size_t at) {
    return std::uint16_t(in[at] | (in[at + 1] << 8));
}

inline std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
    return std::uint32_t(in[at]) | (std::uint32_t(in[at + 1]) << 8) | (std::uint32_t(in[at + 2]) << 16) |
           (std::uint32_t(in[at + 3]) << 24);
}

// Empty string when the header is self-consistent.
inline std::string header_problem(const ContainerHeader& h) {
    const auto& f = h.factors;
    if (h.color != 0) return "unsupported color mode";
    if (h.flags != 0) return "unsupported flags";
    if (h.orig_w == 0 || h.orig_h == 0) return "zero image dimensions";
    if (h.block_w == 0 || h.block_h == 0) return "zero block dimensions";
    if (!(f.k1 >= 1 && f.k1 < f.k2 && f.k2 < f.k3)) return "factors must satisfy k1 < k2 < k3";
    for (int k : {f.k1, f.k2, f.k3})
        if (h.block_w % k != 0 || h.block_h % k != 0) return "block dimensions not divisible by factors";
    const std::uint64_t cols = (std::uint64_t(h.orig_w) + h.block_w - 1) / h.block_w;
    const std::uint64_t rows = (std::uint64_t(h.orig_h) + h.block_h - 1) / h.block_h;
    if (cols * rows != h.n_blocks) return "n_blocks does not match image and block dimensions";
    return {};
}

inline std::size_t block_bytes(const ContainerHeader& h, Tier t) {
    const int k = factor_of(h.factors, t);
    return std::size_t(h.block_w / k) * std::size_t(h.block_h / k) * RasterImage::channels;
}

// Empty string when the plan is budget neutral and uses valid codes.
inline std::string plan_problem(const ContainerHeader& h, std::span<const Tier> plan) {
    if (plan.size() != h.n_blocks) return "plan length does not match n_blocks";
    std::size_t total = 0;
    for (auto t : plan) {
        if (std::uint8_t(t) > 2) return "invalid plan code";
        total += block_bytes(h, t);
    }
    if (total != std::size_t(h.n_blocks) * block_bytes(h, Tier::base))
        return "plan is not budget neutral for n_blocks";
    return {};
}

} // namespace detail

/// Payload bytes for a plan (no header, plan codes or CRC).
inline std::size_t payload_size(std::span<const Tier> plan, const ContainerHeader& header) {
    std::size_t total = 0;
    for (auto t : plan) total += detail::block_bytes(header, t);
    return total;
}

/// Exact serialized length of a container holding `plan`.
inline std::size_t container_size(std::span<const Tier> plan, const ContainerHeader& header) {
    require(!plan.empty(), "container_size: empty plan");
    require(plan.size() == header.n_blocks, "container_size: plan length does not match n_blocks");
    return kHeaderSize + plan.size() + payload_size(plan, header) + kCrcSize;
}

inline std::vector<std::uint8_t> encode(const ContainerHeader& header, std::span<const Tier> plan,
                                        std::span<const RasterImage> blocks) {
    if (auto p = detail::header_problem(header); !p.empty()) fail(ErrorCode::invalid_argument, "encode: " + p);
    require(header.version == kFormatVersion, "encode: unsupported version");
    if (auto p = detail::plan_problem(header, plan); !p.empty()) fail(ErrorCode::invalid_argument, "encode: " + p);
    require(blocks.size() == plan.size(), "encode: block count does not match plan");
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const int k = factor_of(header.factors, plan[i]);
        require(blocks[i].width() == header.block_w / k && blocks[i].height() == header.block_h / k,
                "encode: block " + std::to_string(i) + " has the wrong dimensions for its scale");
    }

    std::vector<std::uint8_t> out;
    out.reserve(container_size(plan, header));
    out.insert(out.end(), kMagic.begin(), kMagic.end());
    out.push_back(header.version);
    out.push_back(header.flags);
    detail::put_u32(out, header.orig_w);
    detail::put_u32(out, header.orig_h);
    detail::put_u16(out, header.block_w);
    detail::put_u16(out, header.block_h);
    out.push_back(std::uint8_t(header.factors.k1));
    out.push_back(std::uint8_t(header.factors.k2));
    out.push_back(std::uint8_t(header.factors.k3));
    out.push_back(header.color);
    detail::put_u32(out, header.n_blocks);
    for (auto t : plan) out.push_back(std::uint8_t(t));
    for (const auto& b : blocks) out.insert(out.end(), b.bytes().begin(), b.bytes().end());
    const auto body = std::span(out).subspan(kHeaderSize);
    detail::put_u32(out, detail::crc32_ieee(body));
    return out;
}

inline std::vector<std::uint8_t> encode(const Container& c) { return encode(c.header, c.plan, c.blocks); }

/// Parses the header fields without validating anything past them.
inline ContainerHeader decode_header(std::span<const std::uint8_t> in) {
    if (in.size() < kHeaderSize) fail(ErrorCode::truncated, "decode: stream shorter than header");
    if (!std::equal(kMagic.begin(), kMagic.end(), in.begin())) fail(ErrorCode::bad_magic, "decode: bad magic");
    ContainerHeader h;
    h.version = in[4];
    h.flags = in[5];
    h.orig_w = detail::get_u32(in, 6);
    h.orig_h = detail::get_u32(in, 10);
    h.block_w = detail::get_u16(in, 14);
    h.block_h = detail::get_u16(in, 16);
    h.factors = {in[18], in[19], in[20]};
    h.color = in[21];
    h.n_blocks = detail::get_u32(in, 22);
    if (h.version != kFormatVersion)
        fail(ErrorCode::unsupported_version, "decode: unsupported version " + std::to_string(h.version));
    return h;
}

struct DecodeOptions {
    bool verify_crc = true;
};

/// Inverse of encode. Checks, in order: length of header, magic, version,
/// header invariants, plan, payload length, CRC.
inline Container decode(std::span<const std::uint8_t> in, DecodeOptions options = {}) {
    Container c;
    c.header = decode_header(in);
    const auto& h = c.header;
    if (auto p = detail::header_problem(h); !p.empty()) fail(ErrorCode::invariant_violation, "decode: " + p);
    if (in.size() < kHeaderSize + h.n_blocks) fail(ErrorCode::truncated, "decode: truncated plan");

    c.plan.reserve(h.n_blocks);
    for (std::size_t i = 0; i < h.n_blocks; ++i) c.plan.push_back(Tier(in[kHeaderSize + i]));
    if (auto p = detail::plan_problem(h, c.plan); !p.empty()) fail(ErrorCode::invariant_violation, "decode: " + p);

    const std::size_t expected = kHeaderSize + h.n_blocks + payload_size(c.plan, h) + kCrcSize;
    if (in.size() < expected) fail(ErrorCode::truncated, "decode: truncated payload");
    if (in.size() > expected) fail(ErrorCode::invariant_violation, "decode: trailing bytes after CRC");

    const auto body = in.subspan(kHeaderSize, expected - kHeaderSize - kCrcSize);
    if (options.verify_crc && detail::crc32_ieee(body) != detail::get_u32(in, expected - kCrcSize))
        fail(ErrorCode::crc_mismatch, "decode: CRC mismatch");

    std::size_t at = kHeaderSize + h.n_blocks;
    c.blocks.reserve(h.n_blocks);
    for (auto t : c.plan) {
        const int k = factor_of(h.factors, t);
        const std::size_t n = detail::block_bytes(h, t);
        c.blocks.emplace_back(h.block_w / k, h.block_h / k,
                              std::vector<std::uint8_t>(in.begin() + std::ptrdiff_t(at),
                                                        in.begin() + std::ptrdiff_t(at + n)));
        at += n;
    }
    return c;
}

/// True when the stored CRC matches; stream must otherwise be well formed.
inline bool crc_ok(std::span<const std::uint8_t> in) {
    try {
        decode(in);
        return true;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::crc_mismatch) return false;
        throw;
    }
}

} // namespace bbmr
