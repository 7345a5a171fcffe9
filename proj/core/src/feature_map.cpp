#include "scp/feature_map.hpp"

#include <cmath>
#include <cstring>

#include "scp/errors.hpp"
#include "scp/similarity.hpp"

namespace scp {

FeatureLayer::FeatureLayer(int downsample, int rows, int cols, int channels,
                           std::vector<float> grid)
    : downsample_(downsample), rows_(rows), cols_(cols), channels_(channels),
      grid_(std::move(grid)) {
    if (downsample_ < 1 || (downsample_ & (downsample_ - 1)) != 0) {
        throw StructureError("layer downsample must be a positive power of two");
    }
    if (rows_ < 1 || cols_ < 1 || channels_ < 1) {
        throw StructureError("layer dimensions must be positive");
    }
    const std::size_t cells = static_cast<std::size_t>(rows_) * cols_;
    if (grid_.size() != cells * channels_) {
        throw DimensionError("layer grid size does not match rows*cols*channels");
    }
    norms_.resize(cells);
    for (std::size_t c = 0; c < cells; ++c) {
        std::span<const float> v(grid_.data() + c * channels_, static_cast<std::size_t>(channels_));
        for (float x : v) {
            if (!std::isfinite(x)) throw DataError("feature layer contains a non-finite value");
        }
        norms_[c] = std::sqrt(squared_norm(v));
    }
}

bool operator==(const FeatureLayer& a, const FeatureLayer& b) {
    // Bitwise comparison so that -0.0f and 0.0f are distinguished.
    return a.downsample_ == b.downsample_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ &&
           a.channels_ == b.channels_ && a.grid_.size() == b.grid_.size() &&
           std::memcmp(a.grid_.data(), b.grid_.data(), a.grid_.size() * sizeof(float)) == 0;
}

FeatureMap::FeatureMap(std::string source_image_id, std::string extractor_tag, int height,
                       int width, double spacing_mm, std::vector<FeatureLayer> layers)
    : source_image_id_(std::move(source_image_id)), extractor_tag_(std::move(extractor_tag)),
      height_(height), width_(width), spacing_mm_(spacing_mm), layers_(std::move(layers)) {
    if (height_ < 1 || width_ < 1) throw StructureError("feature map shape must be positive");
    if (!(spacing_mm_ > 0.0) || !std::isfinite(spacing_mm_)) {
        throw StructureError("feature map spacing must be positive");
    }
    if (layers_.empty()) throw StructureError("feature map needs at least one layer");
    int expected_d = 1;
    for (const auto& layer : layers_) {
        if (layer.downsample() != expected_d) {
            throw StructureError("layer downsample factors must be 1, 2, 4, ...");
        }
        if (layer.rows() != ceil_div(height_, expected_d) ||
            layer.cols() != ceil_div(width_, expected_d)) {
            throw StructureError("layer grid dims must be ceil(height/d) x ceil(width/d)");
        }
        if (layer.channels() != layers_.front().channels()) {
            throw StructureError("all layers must have the same channel count");
        }
        for (double n : layer.norms()) {
            if (n != 0.0 && std::abs(n - 1.0) > kNormTolerance) {
                throw DataError("feature vectors must be unit-norm or exactly zero");
            }
        }
        expected_d *= 2;
    }
}

bool FeatureMap::same_structure(const FeatureMap& other) const {
    if (layers_.size() != other.layers_.size()) return false;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        if (layers_[l].downsample() != other.layers_[l].downsample() ||
            layers_[l].channels() != other.layers_[l].channels()) {
            return false;
        }
    }
    return true;
}

bool operator==(const FeatureMap& a, const FeatureMap& b) {
    return a.source_image_id_ == b.source_image_id_ && a.extractor_tag_ == b.extractor_tag_ &&
           a.height_ == b.height_ && a.width_ == b.width_ &&
           std::memcmp(&a.spacing_mm_, &b.spacing_mm_, sizeof(double)) == 0 &&
           a.layers_ == b.layers_;
}

}  // namespace scp
