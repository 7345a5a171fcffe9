#include "scp/manifest.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "scp/errors.hpp"

namespace scp::cli {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, '\t')) out.push_back(field);
    return out;
}

std::optional<fs::path> optional_path(const std::string& field) {
    if (field.empty() || field == "-") return std::nullopt;
    return fs::path(field);
}

std::string field_of(const std::optional<fs::path>& p) {
    return p ? p->generic_string() : std::string("-");
}

}  // namespace

DatasetManifest DatasetManifest::load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string());
    DatasetManifest m;
    m.root = path.has_parent_path() ? path.parent_path() : fs::path(".");

    std::string line;
    if (!std::getline(in, line) || line != "scp-manifest v1") {
        throw ParseError("manifest must start with 'scp-manifest v1'");
    }
    bool have_spacing = false;
    std::set<std::string> ids;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto fields = split_tabs(line);
        if (fields.size() == 2 && fields[0] == "spacing_mm") {
            try {
                m.spacing_mm = std::stod(fields[1]);
            } catch (const std::exception&) {
                throw ParseError("invalid spacing_mm in manifest");
            }
            if (!(m.spacing_mm > 0.0)) throw ParseError("manifest spacing_mm must be positive");
            have_spacing = true;
            continue;
        }
        if (fields.size() != 5) {
            throw ParseError("manifest entry needs 5 tab-separated fields: '" + line + "'");
        }
        ManifestEntry e{fields[0], fields[1], optional_path(fields[2]), optional_path(fields[3]),
                        optional_path(fields[4])};
        if (e.id.empty() || e.id.find_first_of(" \t") != std::string::npos) {
            throw ParseError("manifest ids must be non-empty and contain no whitespace");
        }
        if (!ids.insert(e.id).second) throw SchemaError("duplicate manifest id '" + e.id + "'");
        m.entries.push_back(std::move(e));
    }
    if (!have_spacing) throw ParseError("manifest lacks a spacing_mm line");

    for (const ManifestEntry& e : m.entries) {
        for (const auto& p : {std::optional<fs::path>(e.image), e.features, e.keypoints, e.landmarks}) {
            if (p && !fs::exists(m.resolve(*p))) {
                throw IoError("manifest entry '" + e.id + "' references missing file " +
                              m.resolve(*p).string());
            }
        }
    }
    return m;
}

void DatasetManifest::save(const fs::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write manifest " + path.string());
    char spacing[64];
    const auto res = std::to_chars(spacing, spacing + sizeof(spacing), spacing_mm);
    *res.ptr = '\0';
    out << "scp-manifest v1\n";
    out << "spacing_mm\t" << spacing << '\n';
    out << "# id\timage\tfeatures\tkeypoints\tlandmarks\n";
    for (const ManifestEntry& e : entries) {
        out << e.id << '\t' << e.image.generic_string() << '\t' << field_of(e.features) << '\t'
            << field_of(e.keypoints) << '\t' << field_of(e.landmarks) << '\n';
    }
    if (!out) throw IoError("failed writing manifest " + path.string());
}

fs::path DatasetManifest::relativize(const fs::path& target) const {
    const fs::path base = fs::weakly_canonical(fs::absolute(root));
    const fs::path full = fs::weakly_canonical(fs::absolute(target));
    fs::path rel = full.lexically_relative(base);
    return rel.empty() ? full : rel;
}

}  // namespace scp::cli
