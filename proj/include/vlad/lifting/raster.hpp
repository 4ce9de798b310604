#pragma once

#include <cstdint>
#include <vector>

namespace vlad::lifting {

struct PixelCoord {
    int u = 0;  // column
    int v = 0;  // row
    friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false);
    BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool in_bounds(int u, int v) const noexcept { return u >= 0 && v >= 0 && u < width_ && v < height_; }
    bool at(int u, int v) const { return bits_[index(u, v)] != 0; }
    void set(int u, int v, bool value = true) { bits_[index(u, v)] = value ? 1 : 0; }

    std::size_t count() const;
    bool empty() const { return count() == 0; }
    std::vector<PixelCoord> set_pixels() const;
    const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

    BinaryMask complement() const;
    // Square structuring element of half-width `radius`.
    BinaryMask dilate(int radius) const;
    BinaryMask intersect(const BinaryMask& other) const;
    BinaryMask unite(const BinaryMask& other) const;
    bool same_shape(const BinaryMask& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    std::size_t index(int u, int v) const {
        return static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(u);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Row-major depth raster. Meters for measured depth, model units for
/// predicted depth. Zero or non-finite entries are invalid; negative finite
/// values are rejected at construction.
class DepthMap {
public:
    DepthMap() = default;
    DepthMap(int width, int height, std::vector<float> values);
    DepthMap(int width, int height, float fill);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    float at(int u, int v) const { return values_[static_cast<std::size_t>(v) * width_ + u]; }
    bool valid(int u, int v) const;
    BinaryMask validity() const;
    const std::vector<float>& values() const noexcept { return values_; }

    friend bool operator==(const DepthMap& a, const DepthMap& b);

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<float> values_;
};

// 8-bit interleaved RGB.
class RgbImage {
public:
    RgbImage() = default;
    RgbImage(int width, int height, std::vector<std::uint8_t> rgb);
    RgbImage(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    const std::uint8_t* pixel(int u, int v) const { return &rgb_[3 * (static_cast<std::size_t>(v) * width_ + u)]; }
    std::uint8_t* pixel(int u, int v) { return &rgb_[3 * (static_cast<std::size_t>(v) * width_ + u)]; }
    const std::vector<std::uint8_t>& data() const noexcept { return rgb_; }

    friend bool operator==(const RgbImage&, const RgbImage&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> rgb_;
};

// Pixels outside `keep` are painted with `fill` (black by default).
RgbImage mask_background(const RgbImage& image, const BinaryMask& keep, std::uint8_t fill = 0);

struct CameraIntrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;

    void validate() const;
};

}  // namespace vlad::lifting
