#pragma once

#include <lzma.h>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

// Computable information density: compressed size over raw size of a chain
// state written one ASCII byte per site.
namespace stdissim::cid {

/// LZMA preset used for every CID value: level 9 with the extreme flag,
/// written in the legacy .lzma container (13-byte header, end marker).
inline constexpr std::uint32_t kPreset = 9 | LZMA_PRESET_EXTREME;

struct CIDResult {
    std::size_t original_bytes = 0;
    std::size_t compressed_bytes = 0;
    double cid = 0.0;
};

inline std::vector<std::uint8_t> encode_state(std::span<const std::uint8_t> occupancy) {
    if (occupancy.empty()) throw InvalidInput("encode_state: empty occupancy");
    std::vector<std::uint8_t> out(occupancy.size());
    for (std::size_t i = 0; i < occupancy.size(); ++i) out[i] = occupancy[i] ? '1' : '0';
    return out;
}

inline std::vector<std::uint8_t> lzma_compress(std::span<const std::uint8_t> bytes) {
    lzma_options_lzma opt;
    if (lzma_lzma_preset(&opt, kPreset)) throw ToolError("lzma: unsupported preset");
    lzma_stream strm = LZMA_STREAM_INIT;
    if (lzma_alone_encoder(&strm, &opt) != LZMA_OK) throw ToolError("lzma: encoder init failed");

    std::vector<std::uint8_t> out(bytes.size() + bytes.size() / 2 + 128);
    strm.next_in = bytes.data();
    strm.avail_in = bytes.size();
    strm.next_out = out.data();
    strm.avail_out = out.size();
    lzma_ret ret;
    while ((ret = lzma_code(&strm, LZMA_FINISH)) == LZMA_OK) {
        if (strm.avail_out == 0) {
            const std::size_t used = out.size();
            out.resize(used * 2);
            strm.next_out = out.data() + used;
            strm.avail_out = out.size() - used;
        }
    }
    const std::size_t produced = strm.total_out;
    lzma_end(&strm);
    if (ret != LZMA_STREAM_END) throw ToolError("lzma: compression failed (code " + std::to_string(ret) + ")");
    out.resize(produced);
    return out;
}

inline CIDResult compute_cid(std::span<const std::uint8_t> occupancy) {
    const auto raw = encode_state(occupancy);
    const auto packed = lzma_compress(raw);
    return {raw.size(), packed.size(), static_cast<double>(packed.size()) / static_cast<double>(raw.size())};
}

} // namespace stdissim::cid
