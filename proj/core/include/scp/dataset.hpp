#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scp/feature_map.hpp"
#include "scp/keypoints.hpp"
#include "scp/landmarks.hpp"

namespace scp {

/// Everything the selector and evaluator know about one image.
struct ImageRecord {
    FeatureMap features;
    KeyPointSet keypoints;
    std::optional<LandmarkSet> landmarks;

    const std::string& id() const { return features.source_image_id(); }
};

using Dataset = std::vector<ImageRecord>;

/// Index of the record with the given id. Throws LookupError if absent.
std::size_t find_record(std::span<const ImageRecord> dataset, std::string_view id);

}  // namespace scp
