#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sparsematch/errors.hpp"
#include "sparsematch/sketch_file.hpp"

using namespace sparsematch;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const char* name)
        : path((std::filesystem::temp_directory_path() / name).string()) {}
    ~TempFile() { std::remove(path.c_str()); }
};

SketchFileData sample_data() {
    const ProblemDims dims{2000, 44, 0, MatchMode::Exact};
    SketchFileData data;
    data.n_db = 2000;
    data.m_query = 44;
    data.layout = make_layout(2000, 44, 2);
    const Signal db = random_binary(2000, 4);
    const auto parts = split(db, data.layout);
    for (std::int64_t b = 0; b < data.layout.block_count; ++b) {
        const StagePlan plan = plan_block(dims, data.layout, b, parts[b].length(), 55);
        data.block_sketches.push_back(sketch_signal(parts[b], plan, SketchKind::Database));
    }
    return data;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

} // namespace

TEST_CASE("sketch file round trip is bit exact") {
    const SketchFileData data = sample_data();
    TempFile f("sm_roundtrip.rsds");
    save_sketch_file(data, f.path);
    const SketchFileData back = load_sketch_file(f.path);
    CHECK(back.n_db == data.n_db);
    CHECK(back.m_query == data.m_query);
    CHECK(back.layout.block_count == data.layout.block_count);
    REQUIRE(back.block_sketches.size() == data.block_sketches.size());
    for (std::size_t b = 0; b < data.block_sketches.size(); ++b) {
        CHECK(back.block_sketches[b].plan.canonical_text() ==
              data.block_sketches[b].plan.canonical_text());
        CHECK(back.block_sketches[b].branches == data.block_sketches[b].branches);
    }
    // saving the loaded copy reproduces the file byte for byte
    TempFile g("sm_roundtrip2.rsds");
    save_sketch_file(back, g.path);
    CHECK(slurp(f.path) == slurp(g.path));
}

TEST_CASE("payload corruption trips the checksum") {
    const SketchFileData data = sample_data();
    TempFile f("sm_corrupt.rsds");
    save_sketch_file(data, f.path);
    std::string bytes = slurp(f.path);
    bytes[bytes.size() - 100] ^= 0x40; // inside the payload
    spit(f.path, bytes);
    CHECK_THROWS_AS(load_sketch_file(f.path), data_error);
}

TEST_CASE("truncation and bad magic are data errors") {
    const SketchFileData data = sample_data();
    TempFile f("sm_trunc.rsds");
    save_sketch_file(data, f.path);
    std::string bytes = slurp(f.path);
    spit(f.path, bytes.substr(0, bytes.size() / 2));
    CHECK_THROWS_AS(load_sketch_file(f.path), data_error);
    std::string evil = bytes;
    evil[0] = 'X';
    spit(f.path, evil);
    CHECK_THROWS_AS(load_sketch_file(f.path), data_error);
}

TEST_CASE("sample counter matches the stored payload") {
    const SketchFileData data = sample_data();
    std::int64_t want = 0;
    for (const auto& sk : data.block_sketches)
        want += sk.plan.total_samples();
    CHECK(data.total_samples() == want);
    TempFile f("sm_count.rsds");
    save_sketch_file(data, f.path);
    // header + 16 bytes per complex sample + 8-byte checksum
    const auto file_size = static_cast<std::int64_t>(slurp(f.path).size());
    CHECK(file_size > want * 16);
    CHECK(file_size < want * 16 + 8192);
}
