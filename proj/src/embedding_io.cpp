#include "miltag/embedding_io.hpp"

#include <cstring>
#include <fstream>

#include "miltag/error.hpp"

namespace miltag {

namespace {

constexpr char kMagic[4] = {'M', 'I', 'L', 'E'};
constexpr std::uint32_t kVersion = 1;

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f32(std::string& out, float v) {
    std::uint32_t u;
    std::memcpy(&u, &v, 4);
    put_u32(out, u);
}

class Reader {
public:
    Reader(const std::string& path, std::vector<unsigned char> bytes)
        : path_(path), bytes_(std::move(bytes)) {}

    std::uint16_t u16() {
        need(2, "field");
        std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }

    std::uint32_t u32() {
        need(4, "field");
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }

    std::string str(std::size_t n) {
        need(n, "clip id");
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
        pos_ += n;
        return s;
    }

    std::size_t remaining() const { return bytes_.size() - pos_; }

    float f32() {
        std::uint32_t u = u32();
        float v;
        std::memcpy(&v, &u, 4);
        return v;
    }

    void need(std::size_t n, const char* what) const {
        if (bytes_.size() - pos_ < n) {
            throw Error(Errc::TruncatedFile, path_ + ": unexpected end of file reading " + what);
        }
    }

    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::vector<unsigned char> bytes_;
    std::size_t pos_ = 0;
};

} // namespace

const ClipEmbeddings* EmbeddingSet::find(const std::string& id) const {
    for (const ClipEmbeddings& clip : clips) {
        if (clip.id == id) return &clip;
    }
    return nullptr;
}

void write_embeddings(const std::string& path, const EmbeddingSet& set) {
    std::string out;
    out.append(kMagic, 4);
    put_u32(out, kVersion);
    put_u32(out, set.dim);
    put_u32(out, static_cast<std::uint32_t>(set.clips.size()));

    for (const ClipEmbeddings& clip : set.clips) {
        if (clip.id.size() > 0xFFFF) {
            throw Error(Errc::InvalidConfig, "clip id '" + clip.id.substr(0, 32) + "...' too long");
        }
        put_u16(out, static_cast<std::uint16_t>(clip.id.size()));
        out.append(clip.id);
        put_u32(out, static_cast<std::uint32_t>(clip.vectors.size()));
        for (const std::vector<float>& vec : clip.vectors) {
            if (vec.size() != set.dim) {
                throw Error(Errc::DimMismatch, "clip " + clip.id + " has a vector of length " +
                                                   std::to_string(vec.size()) + ", dim is " +
                                                   std::to_string(set.dim));
            }
            for (float v : vec) put_f32(out, v);
        }
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(Errc::InvalidConfig, "cannot write " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

EmbeddingSet read_embeddings(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::TruncatedFile, "cannot open " + path);
    Reader r(path, std::vector<unsigned char>((std::istreambuf_iterator<char>(in)),
                                              std::istreambuf_iterator<char>()));

    r.need(4, "magic");
    const std::string magic = r.str(4);
    if (std::memcmp(magic.data(), kMagic, 4) != 0) {
        throw Error(Errc::BadMagic, path + " is not a MILE embedding file");
    }
    const std::uint32_t version = r.u32();
    if (version != kVersion) {
        throw Error(Errc::VersionMismatch, path + ": version " + std::to_string(version) +
                                               ", this reader handles version 1");
    }

    EmbeddingSet set;
    set.source = EmbeddingSource::External;
    set.dim = r.u32();
    const std::uint32_t clip_count = r.u32();
    set.clips.reserve(clip_count);

    for (std::uint32_t c = 0; c < clip_count; ++c) {
        ClipEmbeddings clip;
        const std::uint16_t id_len = r.u16();
        clip.id = r.str(id_len);
        const std::uint32_t n_instances = r.u32();
        const std::size_t want = static_cast<std::size_t>(n_instances) * set.dim * 4;
        if (r.remaining() < want) {
            throw Error(Errc::DimMismatch,
                        path + ": clip " + clip.id + " should carry " +
                            std::to_string(static_cast<std::size_t>(n_instances) * set.dim) +
                            " floats but only " + std::to_string(r.remaining() / 4) +
                            " remain");
        }
        clip.vectors.resize(n_instances);
        for (std::uint32_t j = 0; j < n_instances; ++j) {
            clip.vectors[j].resize(set.dim);
            for (std::uint32_t k = 0; k < set.dim; ++k) clip.vectors[j][k] = r.f32();
        }
        set.clips.push_back(std::move(clip));
    }
    return set;
}

} // namespace miltag
