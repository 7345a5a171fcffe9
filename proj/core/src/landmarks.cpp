#include "scp/landmarks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "scp/dataset.hpp"
#include "scp/errors.hpp"

namespace scp {

PixelCoord to_pixel(LandmarkPoint p, int width, int height) {
    const auto x = static_cast<int>(std::clamp<long>(std::lround(p.x), 0, width - 1));
    const auto y = static_cast<int>(std::clamp<long>(std::lround(p.y), 0, height - 1));
    return {x, y};
}

void write_landmarks(std::ostream& out, const LandmarkSet& lm) {
    out << "scp-lm v1 " << lm.image_id << ' ' << lm.points.size() << '\n';
    char buf[96];
    for (const LandmarkPoint& p : lm.points) {
        std::snprintf(buf, sizeof(buf), "%.9g %.9g\n", p.x, p.y);
        out << buf;
    }
}

LandmarkSet read_landmarks(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty landmark file");
    std::istringstream header(line);
    std::string magic, version, id;
    long count = -1;
    header >> magic >> version >> id >> count;
    if (magic != "scp-lm") throw MagicError("landmark file must start with 'scp-lm'");
    if (version != "v1") throw VersionError("unsupported landmark file version '" + version + "'");
    if (id.empty() || count < 0) throw ParseError("landmark header lacks image id or count");
    LandmarkSet lm{id, {}};
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        LandmarkPoint p;
        if (!(row >> p.x >> p.y) || !std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw ParseError("malformed landmark line: '" + line + "'");
        }
        lm.points.push_back(p);
    }
    if (static_cast<long>(lm.points.size()) != count) {
        throw SchemaError("landmark file for '" + id + "' declares " + std::to_string(count) +
                          " points but holds " + std::to_string(lm.points.size()));
    }
    return lm;
}

void write_landmarks_file(const LandmarkSet& lm, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    write_landmarks(out, lm);
    if (!out) throw IoError("failed writing " + path.string());
}

LandmarkSet read_landmarks_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return read_landmarks(in);
}

std::size_t find_record(std::span<const ImageRecord> dataset, std::string_view id) {
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (dataset[i].id() == id) return i;
    }
    throw LookupError("no image with id '" + std::string(id) + "' in the dataset");
}

}  // namespace scp
