#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace scp {

/// One resolution level of a dense feature map.
///
/// The grid is stored row-major with channels fastest. Per-cell L2 norms are
/// derived on construction and cached; they are not part of the value.
class FeatureLayer {
public:
    FeatureLayer(int downsample, int rows, int cols, int channels, std::vector<float> grid);

    int downsample() const { return downsample_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int channels() const { return channels_; }

    std::span<const float> at(int row, int col) const {
        return {grid_.data() + cell_index(row, col) * static_cast<std::size_t>(channels_),
                static_cast<std::size_t>(channels_)};
    }
    double norm_at(int row, int col) const { return norms_[cell_index(row, col)]; }

    std::span<const float> grid() const { return grid_; }
    std::span<const double> norms() const { return norms_; }

    friend bool operator==(const FeatureLayer& a, const FeatureLayer& b);

private:
    std::size_t cell_index(int row, int col) const {
        return static_cast<std::size_t>(row) * cols_ + col;
    }

    int downsample_;
    int rows_;
    int cols_;
    int channels_;
    std::vector<float> grid_;
    std::vector<double> norms_;
};

/// Multi-layer stack of per-pixel feature vectors for one image.
///
/// Layer l has downsample 2^l and ceil(height/2^l) x ceil(width/2^l) cells.
/// Every cell vector is unit-norm (within kNormTolerance) or exactly zero.
/// All invariants are validated on construction; a FeatureMap is immutable.
class FeatureMap {
public:
    static constexpr double kNormTolerance = 1e-5;

    FeatureMap(std::string source_image_id, std::string extractor_tag, int height, int width,
               double spacing_mm, std::vector<FeatureLayer> layers);

    const std::string& source_image_id() const { return source_image_id_; }
    const std::string& extractor_tag() const { return extractor_tag_; }
    int height() const { return height_; }
    int width() const { return width_; }
    double spacing_mm() const { return spacing_mm_; }
    int channels() const { return layers_.front().channels(); }
    std::size_t layer_count() const { return layers_.size(); }
    const FeatureLayer& layer(std::size_t l) const { return layers_[l]; }
    const std::vector<FeatureLayer>& layers() const { return layers_; }

    bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    /// True when both maps have the same layer count, downsample factors and
    /// channel count. Full-resolution shapes may differ.
    bool same_structure(const FeatureMap& other) const;

    friend bool operator==(const FeatureMap& a, const FeatureMap& b);

private:
    std::string source_image_id_;
    std::string extractor_tag_;
    int height_;
    int width_;
    double spacing_mm_;
    std::vector<FeatureLayer> layers_;
};

/// ceil(n / d) for positive d.
constexpr int ceil_div(int n, int d) { return (n + d - 1) / d; }

}  // namespace scp
