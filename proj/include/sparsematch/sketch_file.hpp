#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sparsematch/blocks.hpp"
#include "sparsematch/sketch.hpp"

namespace sparsematch {

// On-disk sketch: magic "RSDS", version, dimensions, per-block canonical
// plan text, payload of complex samples as little-endian double pairs
// (block-, stage-, shift-major, index order), trailing FNV-1a 64 checksum
// of the payload.
struct SketchFileData {
    std::int64_t n_db = 0;
    std::int64_t m_query = 0; // query-length regime the plans were built for
    BlockLayout layout;
    std::vector<Sketch> block_sketches;

    std::int64_t total_samples() const;
};

void save_sketch_file(const SketchFileData& data, const std::string& path);
SketchFileData load_sketch_file(const std::string& path); // throws data_error on corruption

std::uint64_t fnv1a64(const unsigned char* bytes, std::size_t len);

} // namespace sparsematch
