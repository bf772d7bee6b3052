#include <cstring>
#include <fstream>
#include <iterator>

#include "craterid/index.hpp"

// Layout (host little-endian):
//   "CRTRIDX\0" u32 version u64 scale_hash u32 blob_len blob
//   u8 kind u8 convention u32 dim
//   u64 ncraters { u16 idlen id f64 lat lon a b psi arc }
//   u64 nentries { u32 id0 id1 id2 i64 home f64[dim] }
//   f64[dim] whiten_scale   u64[4] diagnostics
//   u64 nnodes { i32 split_dim f64 split u32 begin end i32 left right }
//   u64 nperm { u32 }
//   "ENDX" u64 fnv1a(all preceding bytes)

namespace craterid {

namespace {

constexpr char kMagic[8] = {'C', 'R', 'T', 'R', 'I', 'D', 'X', '\0'};
constexpr char kTrailer[4] = {'E', 'N', 'D', 'X'};

uint64_t fnv1a(const uint8_t* p, size_t n) {
    uint64_t h = 1469598103934665603ULL;
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

class Writer {
public:
    template <class T>
    void put(const T& v) {
        const auto* p = reinterpret_cast<const uint8_t*>(&v);
        buf.insert(buf.end(), p, p + sizeof(T));
    }
    void bytes(const void* p, size_t n) {
        const auto* b = static_cast<const uint8_t*>(p);
        buf.insert(buf.end(), b, b + n);
    }
    void str16(const std::string& s) {
        if (s.size() > 0xffff) throw Error(ErrorCode::invalid_argument, "string too long");
        put<uint16_t>(uint16_t(s.size()));
        bytes(s.data(), s.size());
    }
    void str32(const std::string& s) {
        put<uint32_t>(uint32_t(s.size()));
        bytes(s.data(), s.size());
    }
    std::vector<uint8_t> buf;
};

class Reader {
public:
    Reader(const uint8_t* p, size_t n) : p_(p), n_(n) {}
    template <class T>
    T get() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, p_ + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    void bytes(void* out, size_t n) {
        need(n);
        std::memcpy(out, p_ + pos_, n);
        pos_ += n;
    }
    std::string str16() {
        const uint16_t n = get<uint16_t>();
        std::string s(n, '\0');
        bytes(s.data(), n);
        return s;
    }
    std::string str32() {
        const uint32_t n = get<uint32_t>();
        need(n);
        std::string s(n, '\0');
        bytes(s.data(), n);
        return s;
    }
    size_t pos() const { return pos_; }
    size_t remaining() const { return n_ - pos_; }
    void need(size_t n) const {
        if (n > n_ - pos_) throw Error(ErrorCode::io_error, "index file is truncated");
    }
    /// Count read from the file; reject sizes the remaining bytes cannot hold.
    uint64_t count(size_t min_record) {
        const uint64_t c = get<uint64_t>();
        if (min_record > 0 && c > remaining() / min_record)
            throw Error(ErrorCode::io_error, "index file is truncated");
        return c;
    }

private:
    const uint8_t* p_;
    size_t n_;
    size_t pos_ = 0;
};

}  // namespace

std::vector<uint8_t> serialize_scale(const IndexScale& s) {
    Writer w;
    w.str32(s.name);
    w.put<int32_t>(s.k);
    w.put<double>(s.d_min);
    w.put<double>(s.d_max);
    w.put<double>(s.max_ellipticity);
    w.put<double>(s.min_arc_fraction);
    w.put<uint8_t>(uint8_t(s.kind));
    w.put<uint8_t>(uint8_t(s.convention));
    w.put<uint8_t>(s.whiten ? 1 : 0);
    w.put<double>(s.moon_radius);
    w.put<double>(s.separation_margin);
    w.put<double>(s.canonical_altitude);
    return w.buf;
}

uint64_t scale_hash(const IndexScale& s) {
    const auto b = serialize_scale(s);
    return fnv1a(b.data(), b.size());
}

namespace {

IndexScale parse_scale(const std::vector<uint8_t>& blob) {
    Reader r(blob.data(), blob.size());
    IndexScale s;
    s.name = r.str32();
    s.k = r.get<int32_t>();
    s.d_min = r.get<double>();
    s.d_max = r.get<double>();
    s.max_ellipticity = r.get<double>();
    s.min_arc_fraction = r.get<double>();
    const uint8_t kind = r.get<uint8_t>();
    const uint8_t conv = r.get<uint8_t>();
    if (kind > 1 || conv > 3) throw Error(ErrorCode::schema_error, "unknown descriptor kind or convention");
    s.kind = DescriptorKind(kind);
    s.convention = Convention(conv);
    s.whiten = r.get<uint8_t>() != 0;
    s.moon_radius = r.get<double>();
    s.separation_margin = r.get<double>();
    s.canonical_altitude = r.get<double>();
    return s;
}

}  // namespace

std::vector<uint8_t> serialize_index(const DescriptorIndex& idx) {
    Writer w;
    w.bytes(kMagic, sizeof kMagic);
    w.put<uint32_t>(kIndexFormatVersion);
    w.put<uint64_t>(scale_hash(idx.scale));
    const auto blob = serialize_scale(idx.scale);
    w.put<uint32_t>(uint32_t(blob.size()));
    w.bytes(blob.data(), blob.size());
    w.put<uint8_t>(uint8_t(idx.scale.kind));
    w.put<uint8_t>(uint8_t(idx.scale.convention));
    w.put<uint32_t>(uint32_t(idx.dim));

    w.put<uint64_t>(idx.craters.size());
    for (const auto& c : idx.craters) {
        w.str16(c.id);
        w.put(c.lat);
        w.put(c.lon);
        w.put(c.a);
        w.put(c.b);
        w.put(c.psi);
        w.put(c.arc_fraction);
    }
    w.put<uint64_t>(idx.entries.size());
    for (size_t i = 0; i < idx.entries.size(); ++i) {
        const auto& e = idx.entries[i];
        for (uint32_t id : e.ids) w.put(id);
        w.put<int64_t>(e.home);
        w.bytes(idx.descriptor(i), sizeof(double) * idx.dim);
    }
    w.bytes(idx.whiten_scale.data(), sizeof(double) * idx.dim);
    w.put<uint64_t>(idx.diag.candidates);
    w.put<uint64_t>(idx.diag.skipped_overlap);
    w.put<uint64_t>(idx.diag.skipped_acosh);
    w.put<uint64_t>(idx.diag.skipped_other);

    const auto& nodes = idx.tree.nodes();
    w.put<uint64_t>(nodes.size());
    for (const auto& nd : nodes) {
        w.put<int32_t>(nd.split_dim);
        w.put<double>(nd.split);
        w.put<uint32_t>(nd.begin);
        w.put<uint32_t>(nd.end);
        w.put<int32_t>(nd.left);
        w.put<int32_t>(nd.right);
    }
    const auto& perm = idx.tree.perm();
    w.put<uint64_t>(perm.size());
    w.bytes(perm.data(), sizeof(uint32_t) * perm.size());
    w.bytes(kTrailer, sizeof kTrailer);
    w.put<uint64_t>(fnv1a(w.buf.data(), w.buf.size()));
    return w.buf;
}

DescriptorIndex deserialize_index(const std::vector<uint8_t>& bytes) {
    Reader r(bytes.data(), bytes.size());
    char magic[8];
    r.bytes(magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw Error(ErrorCode::schema_error, "not an index file");
    const uint32_t version = r.get<uint32_t>();
    if (version != kIndexFormatVersion)
        throw Error(ErrorCode::version_mismatch, "index format version " + std::to_string(version) +
                                                     ", expected " + std::to_string(kIndexFormatVersion));
    const uint64_t hash = r.get<uint64_t>();
    const uint32_t blob_len = r.get<uint32_t>();
    r.need(blob_len);
    std::vector<uint8_t> blob(blob_len);
    r.bytes(blob.data(), blob_len);
    DescriptorIndex idx;
    idx.scale = parse_scale(blob);
    if (scale_hash(idx.scale) != hash) throw Error(ErrorCode::version_mismatch, "scale config hash mismatch");
    const uint8_t kind = r.get<uint8_t>();
    const uint8_t conv = r.get<uint8_t>();
    if (kind != uint8_t(idx.scale.kind) || conv != uint8_t(idx.scale.convention))
        throw Error(ErrorCode::schema_error, "descriptor kind disagrees with scale config");
    idx.dim = int(r.get<uint32_t>());
    if (idx.dim != descriptor_dim(idx.scale.kind, idx.scale.convention))
        throw Error(ErrorCode::schema_error, "descriptor dimension disagrees with scale config");
    const int dim = idx.dim;

    const uint64_t nc = r.count(2 + 6 * sizeof(double));
    idx.craters.resize(nc);
    for (auto& c : idx.craters) {
        c.id = r.str16();
        c.lat = r.get<double>();
        c.lon = r.get<double>();
        c.a = r.get<double>();
        c.b = r.get<double>();
        c.psi = r.get<double>();
        c.arc_fraction = r.get<double>();
    }
    const uint64_t ne = r.count(3 * 4 + 8 + sizeof(double) * dim);
    idx.entries.resize(ne);
    idx.descriptors.resize(ne * dim);
    for (uint64_t i = 0; i < ne; ++i) {
        auto& e = idx.entries[i];
        for (auto& id : e.ids) {
            id = r.get<uint32_t>();
            if (id >= nc) throw Error(ErrorCode::schema_error, "entry references unknown crater");
        }
        e.home = r.get<int64_t>();
        r.bytes(&idx.descriptors[i * dim], sizeof(double) * dim);
    }
    idx.whiten_scale.resize(dim);
    r.bytes(idx.whiten_scale.data(), sizeof(double) * dim);
    idx.diag.candidates = r.get<uint64_t>();
    idx.diag.skipped_overlap = r.get<uint64_t>();
    idx.diag.skipped_acosh = r.get<uint64_t>();
    idx.diag.skipped_other = r.get<uint64_t>();

    const uint64_t nn = r.count(28);
    std::vector<KdTree::Node> nodes(nn);
    for (auto& nd : nodes) {
        nd.split_dim = r.get<int32_t>();
        nd.split = r.get<double>();
        nd.begin = r.get<uint32_t>();
        nd.end = r.get<uint32_t>();
        nd.left = r.get<int32_t>();
        nd.right = r.get<int32_t>();
    }
    const uint64_t np = r.count(4);
    std::vector<uint32_t> perm(np);
    r.bytes(perm.data(), sizeof(uint32_t) * np);
    char trailer[4];
    r.bytes(trailer, sizeof trailer);
    if (std::memcmp(trailer, kTrailer, sizeof trailer) != 0) throw Error(ErrorCode::io_error, "corrupt index trailer");
    const size_t body = r.pos();
    const uint64_t sum = r.get<uint64_t>();
    if (sum != fnv1a(bytes.data(), body)) throw Error(ErrorCode::io_error, "index checksum mismatch");
    if (r.remaining() != 0) throw Error(ErrorCode::io_error, "trailing bytes after index");
    if (np != ne) throw Error(ErrorCode::schema_error, "tree does not cover all entries");

    std::vector<double> pts(idx.descriptors.size());
    for (uint64_t i = 0; i < ne; ++i)
        for (int q = 0; q < dim; ++q) pts[i * dim + q] = idx.descriptors[i * dim + q] / idx.whiten_scale[q];
    idx.tree.adopt(std::move(pts), dim, std::move(nodes), std::move(perm));
    return idx;
}

void save_index(const DescriptorIndex& idx, const std::string& path) {
    const auto bytes = serialize_index(idx);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw Error(ErrorCode::io_error, "write failed for " + path);
}

DescriptorIndex load_index(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_error, "cannot open " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_index(bytes);
}

}  // namespace craterid
