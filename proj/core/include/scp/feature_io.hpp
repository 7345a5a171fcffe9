#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "scp/feature_map.hpp"

namespace scp {

/// SCPF binary feature-map format, little-endian throughout:
///
///   "SCPF" | u16 version (=1)
///   u16 id_len | id bytes | u16 tag_len | tag bytes
///   u32 height | u32 width | f64 spacing_mm | u8 layer_count | u16 channels
///   per layer: u16 downsample | u32 rows | u32 cols | rows*cols*channels f32
///              (row-major, channel fastest)
inline constexpr std::uint16_t kFeatureFormatVersion = 1;

/// Largest side and per-layer element count accepted by the decoder.
inline constexpr std::uint64_t kMaxFeatureSide = 1u << 20;
inline constexpr std::uint64_t kMaxLayerElements = std::uint64_t{1} << 31;

std::vector<std::uint8_t> encode_feature_map(const FeatureMap& fm);

/// Decodes an SCPF buffer. Throws MagicError, VersionError, TruncatedError,
/// DimensionOverflowError or StructureError for the matching malformation,
/// and DataError when the payload breaks a FeatureMap value invariant.
FeatureMap decode_feature_map(std::span<const std::uint8_t> bytes);

void write_feature_file(const FeatureMap& fm, const std::filesystem::path& path);
FeatureMap read_feature_file(const std::filesystem::path& path);

}  // namespace scp
