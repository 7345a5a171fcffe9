#include "scp/feature_io.hpp"

#include <bit>
#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "scp/errors.hpp"

namespace scp {

static_assert(std::endian::native == std::endian::little,
              "SCPF encoding assumes a little-endian host");

namespace {

class Writer {
public:
    template <typename T>
    void put(T v) {
        const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
        out_.insert(out_.end(), p, p + sizeof(T));
    }
    void put_string(const std::string& s) {
        if (s.size() > std::numeric_limits<std::uint16_t>::max()) {
            throw ArgumentError("string too long for SCPF header");
        }
        put(static_cast<std::uint16_t>(s.size()));
        out_.insert(out_.end(), s.begin(), s.end());
    }
    void put_floats(std::span<const float> v) {
        const auto* p = reinterpret_cast<const std::uint8_t*>(v.data());
        out_.insert(out_.end(), p, p + v.size_bytes());
    }
    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    template <typename T>
    T get() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    std::string get_string() {
        const auto len = get<std::uint16_t>();
        need(len);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), len);
        pos_ += len;
        return s;
    }
    std::vector<float> get_floats(std::size_t count) {
        need(count * sizeof(float));
        std::vector<float> v(count);
        std::memcpy(v.data(), bytes_.data() + pos_, count * sizeof(float));
        pos_ += count * sizeof(float);
        return v;
    }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw TruncatedError("SCPF payload is truncated");
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

constexpr char kMagic[4] = {'S', 'C', 'P', 'F'};

}  // namespace

std::vector<std::uint8_t> encode_feature_map(const FeatureMap& fm) {
    Writer w;
    for (char c : kMagic) w.put(static_cast<std::uint8_t>(c));
    w.put(kFeatureFormatVersion);
    w.put_string(fm.source_image_id());
    w.put_string(fm.extractor_tag());
    w.put(static_cast<std::uint32_t>(fm.height()));
    w.put(static_cast<std::uint32_t>(fm.width()));
    w.put(fm.spacing_mm());
    w.put(static_cast<std::uint8_t>(fm.layer_count()));
    w.put(static_cast<std::uint16_t>(fm.channels()));
    for (const FeatureLayer& layer : fm.layers()) {
        w.put(static_cast<std::uint16_t>(layer.downsample()));
        w.put(static_cast<std::uint32_t>(layer.rows()));
        w.put(static_cast<std::uint32_t>(layer.cols()));
        w.put_floats(layer.grid());
    }
    return w.take();
}

FeatureMap decode_feature_map(std::span<const std::uint8_t> bytes) {
    const std::size_t head = std::min<std::size_t>(bytes.size(), 4);
    if (std::memcmp(bytes.data(), kMagic, head) != 0) throw MagicError("missing SCPF magic bytes");
    if (head < 4) throw TruncatedError("SCPF payload is truncated");
    Reader r(bytes.subspan(4));
    const auto version = r.get<std::uint16_t>();
    if (version != kFeatureFormatVersion) {
        throw VersionError("unsupported SCPF version " + std::to_string(version));
    }
    std::string id = r.get_string();
    std::string tag = r.get_string();
    const std::uint64_t height = r.get<std::uint32_t>();
    const std::uint64_t width = r.get<std::uint32_t>();
    const auto spacing = r.get<double>();
    const auto layer_count = r.get<std::uint8_t>();
    const std::uint64_t channels = r.get<std::uint16_t>();

    if (height > kMaxFeatureSide || width > kMaxFeatureSide) {
        throw DimensionOverflowError("SCPF image shape exceeds the supported maximum");
    }
    if (height == 0 || width == 0 || layer_count == 0 || channels == 0) {
        throw StructureError("SCPF header declares an empty shape, layer list or channel count");
    }
    if (!(spacing > 0.0)) throw StructureError("SCPF spacing must be positive");

    std::vector<FeatureLayer> layers;
    layers.reserve(layer_count);
    std::uint64_t expected_d = 1;
    for (unsigned l = 0; l < layer_count; ++l) {
        const std::uint64_t d = r.get<std::uint16_t>();
        const std::uint64_t rows = r.get<std::uint32_t>();
        const std::uint64_t cols = r.get<std::uint32_t>();
        if (rows > kMaxFeatureSide || cols > kMaxFeatureSide ||
            rows * cols * channels > kMaxLayerElements) {
            throw DimensionOverflowError("SCPF layer " + std::to_string(l) +
                                         " exceeds the supported element count");
        }
        if (d != expected_d) {
            throw StructureError("SCPF layer " + std::to_string(l) + " has downsample " +
                                 std::to_string(d) + ", expected " + std::to_string(expected_d));
        }
        if (rows != (height + d - 1) / d || cols != (width + d - 1) / d) {
            throw StructureError("SCPF layer " + std::to_string(l) +
                                 " dims are inconsistent with the image shape");
        }
        auto grid = r.get_floats(static_cast<std::size_t>(rows * cols * channels));
        layers.emplace_back(static_cast<int>(d), static_cast<int>(rows), static_cast<int>(cols),
                            static_cast<int>(channels), std::move(grid));
        expected_d *= 2;
    }
    if (r.remaining() != 0) throw StructureError("SCPF file has trailing bytes");
    return FeatureMap(std::move(id), std::move(tag), static_cast<int>(height),
                      static_cast<int>(width), spacing, std::move(layers));
}

void write_feature_file(const FeatureMap& fm, const std::filesystem::path& path) {
    const auto bytes = encode_feature_map(fm);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing " + path.string());
}

FeatureMap read_feature_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return decode_feature_map(bytes);
}

}  // namespace scp
