#include "sparsematch/sketch_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "sparsematch/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "sketch file layout assumes a little-endian host");

namespace sparsematch {

namespace {

constexpr char kMagic[4] = {'R', 'S', 'D', 'S'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::string& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

class Reader {
public:
    Reader(const std::string& bytes, const std::string& path) : bytes_(bytes), path_(path) {}

    template <typename T>
    T get() {
        if (pos_ + sizeof(T) > bytes_.size())
            throw data_error("sketch file truncated: " + path_);
        T v;
        std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }

    std::string get_bytes(std::size_t n) {
        if (pos_ + n > bytes_.size())
            throw data_error("sketch file truncated: " + path_);
        std::string s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    std::size_t pos() const { return pos_; }

private:
    const std::string& bytes_;
    const std::string& path_;
    std::size_t pos_ = 0;
};

} // namespace

std::uint64_t fnv1a64(const unsigned char* bytes, std::size_t len) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::int64_t SketchFileData::total_samples() const {
    std::int64_t total = 0;
    for (const auto& sk : block_sketches)
        total += sk.plan.total_samples();
    return total;
}

void save_sketch_file(const SketchFileData& data, const std::string& path) {
    if (static_cast<std::int64_t>(data.block_sketches.size()) != data.layout.block_count)
        throw invalid_input("sketch file: one sketch per block required");

    std::string header;
    header.append(kMagic, sizeof(kMagic));
    put<std::uint32_t>(header, kVersion);
    put<std::int64_t>(header, data.n_db);
    put<std::int64_t>(header, data.m_query);
    put<std::int64_t>(header, data.layout.block_count);
    put<std::int64_t>(header, data.layout.block_len);
    put<std::int64_t>(header, data.layout.overlap);
    for (const auto& sk : data.block_sketches) {
        const std::string text = sk.plan.canonical_text();
        put<std::uint32_t>(header, static_cast<std::uint32_t>(text.size()));
        header += text;
    }

    std::string payload;
    for (const auto& sk : data.block_sketches) {
        sk.validate_shape();
        for (const auto& stage : sk.branches)
            for (const auto& branch : stage)
                for (const cplx& v : branch) {
                    put<double>(payload, v.real());
                    put<double>(payload, v.imag());
                }
    }
    const std::uint64_t sum =
        fnv1a64(reinterpret_cast<const unsigned char*>(payload.data()), payload.size());

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw data_error("cannot write sketch file: " + path);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    out.write(reinterpret_cast<const char*>(&sum), sizeof(sum));
    if (!out)
        throw data_error("short write to sketch file: " + path);
}

SketchFileData load_sketch_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw data_error("cannot open sketch file: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Reader r(bytes, path);

    char magic[4];
    const std::string m = r.get_bytes(4);
    std::memcpy(magic, m.data(), 4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw data_error("not a sketch file (bad magic): " + path);
    if (r.get<std::uint32_t>() != kVersion)
        throw data_error("unsupported sketch file version: " + path);

    SketchFileData data;
    data.n_db = r.get<std::int64_t>();
    data.m_query = r.get<std::int64_t>();
    data.layout.block_count = r.get<std::int64_t>();
    data.layout.block_len = r.get<std::int64_t>();
    data.layout.overlap = r.get<std::int64_t>();
    for (std::int64_t b = 0; b < data.layout.block_count; ++b)
        data.layout.offsets.push_back(b * data.layout.block_len);

    for (std::int64_t b = 0; b < data.layout.block_count; ++b) {
        const auto len = r.get<std::uint32_t>();
        Sketch sk;
        sk.plan = StagePlan::parse_canonical_text(r.get_bytes(len));
        sk.kind = SketchKind::Database;
        data.block_sketches.push_back(std::move(sk));
    }

    const std::size_t payload_start = r.pos();
    for (auto& sk : data.block_sketches) {
        sk.branches.resize(static_cast<std::size_t>(sk.plan.d));
        for (int i = 0; i < sk.plan.d; ++i) {
            const std::int64_t f = sk.plan.stage_lengths[static_cast<std::size_t>(i)];
            auto& stage = sk.branches[static_cast<std::size_t>(i)];
            stage.resize(static_cast<std::size_t>(sk.plan.b_shifts));
            for (auto& branch : stage) {
                branch.resize(static_cast<std::size_t>(f));
                for (auto& v : branch) {
                    const double re = r.get<double>();
                    const double im = r.get<double>();
                    v = {re, im};
                }
            }
        }
    }
    const std::size_t payload_len = r.pos() - payload_start;
    const auto stored = r.get<std::uint64_t>();
    const std::uint64_t sum = fnv1a64(
        reinterpret_cast<const unsigned char*>(bytes.data()) + payload_start, payload_len);
    if (stored != sum)
        throw data_error("sketch file checksum mismatch: " + path);
    if (r.pos() != bytes.size())
        throw data_error("trailing garbage in sketch file: " + path);
    return data;
}

} // namespace sparsematch
