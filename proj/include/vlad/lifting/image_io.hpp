#pragma once

#include "vlad/lifting/raster.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace vlad::lifting {

using Bytes = std::vector<std::uint8_t>;

// PNG codecs. Any color type is accepted on read; palette and low bit depths
// are expanded, alpha is dropped.
RgbImage decode_rgb_png(std::span<const std::uint8_t> png);
Bytes encode_rgb_png(const RgbImage& image);

// Masks: any nonzero sample is set. Written as 8-bit gray, 0 / 255.
BinaryMask decode_mask_png(std::span<const std::uint8_t> png);
Bytes encode_mask_png(const BinaryMask& mask);

// Measured depth: 16-bit gray PNG in millimeters, 0 = invalid. Read as meters.
DepthMap decode_depth_png_mm(std::span<const std::uint8_t> png);
Bytes encode_depth_png_mm(const DepthMap& depth_m);

// Predicted depth: u32 width, u32 height (little-endian), then width*height f32.
DepthMap decode_depth_f32(std::span<const std::uint8_t> raw);
Bytes encode_depth_f32(const DepthMap& depth);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

RgbImage read_rgb_png(const std::filesystem::path& path);
void write_rgb_png(const std::filesystem::path& path, const RgbImage& image);
BinaryMask read_mask_png(const std::filesystem::path& path);
void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask);
DepthMap read_depth_png_mm(const std::filesystem::path& path);
void write_depth_png_mm(const std::filesystem::path& path, const DepthMap& depth_m);
DepthMap read_depth_f32(const std::filesystem::path& path);
void write_depth_f32(const std::filesystem::path& path, const DepthMap& depth);

// Dispatches on extension: ".f32" raw raster, otherwise 16-bit millimeter PNG.
DepthMap read_depth(const std::filesystem::path& path);

}  // namespace vlad::lifting
