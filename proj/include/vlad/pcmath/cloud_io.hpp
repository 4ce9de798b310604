#pragma once

#include "vlad/pcmath/point_cloud.hpp"

#include <filesystem>

namespace vlad::pcmath {

// ASCII: one "x y z" triple per line; blank lines and '#' comments skipped.
PointCloud read_xyz(const std::filesystem::path& path, Frame frame, Role role = Role::Untagged);
void write_xyz(const std::filesystem::path& path, const PointCloud& cloud);

// Binary: u64 little-endian point count, then count little-endian f32 (x, y, z).
PointCloud read_binary_cloud(const std::filesystem::path& path, Frame frame, Role role = Role::Untagged);
void write_binary_cloud(const std::filesystem::path& path, const PointCloud& cloud);

// Picks the binary reader for ".bin"/".f32c" extensions, ASCII otherwise.
PointCloud read_cloud(const std::filesystem::path& path, Frame frame, Role role = Role::Untagged);

}  // namespace vlad::pcmath
