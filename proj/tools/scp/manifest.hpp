#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace scp::cli {

namespace fs = std::filesystem;

/// One image of a manifest. Paths are relative to the manifest root.
struct ManifestEntry {
    std::string id;
    fs::path image;
    std::optional<fs::path> features;
    std::optional<fs::path> keypoints;
    std::optional<fs::path> landmarks;
};

/// Line-oriented "scp-manifest v1" file:
///
///   scp-manifest v1
///   spacing_mm<TAB>0.1
///   <id><TAB><image><TAB><features|-><TAB><keypoints|-><TAB><landmarks|->
///
/// Lines starting with '#' are comments. The root is the directory holding
/// the manifest file.
struct DatasetManifest {
    fs::path root;
    double spacing_mm = 1.0;
    std::vector<ManifestEntry> entries;

    /// Throws ParseError on malformed content, SchemaError on duplicate ids
    /// and IoError if the file or any referenced file is missing.
    static DatasetManifest load(const fs::path& path);
    void save(const fs::path& path) const;

    fs::path resolve(const fs::path& relative) const { return root / relative; }
    /// Path of `target` relative to the root, for storing in the manifest.
    fs::path relativize(const fs::path& target) const;
};

}  // namespace scp::cli
