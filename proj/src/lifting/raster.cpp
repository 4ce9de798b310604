#include "vlad/lifting/raster.hpp"

#include "vlad/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

namespace vlad::lifting {

namespace {

void check_dims(int width, int height, std::size_t count, const char* what) {
    if (width < 0 || height < 0 ||
        static_cast<std::size_t>(width) * static_cast<std::size_t>(height) != count) {
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + " size does not match width*height");
    }
}

}  // namespace

BinaryMask::BinaryMask(int width, int height, bool fill)
    : width_(width), height_(height),
      bits_(static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0)),
            fill ? 1 : 0) {}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
    check_dims(width, height, bits_.size(), "mask");
    for (auto& b : bits_) {
        b = b != 0 ? 1 : 0;
    }
}

std::size_t BinaryMask::count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<PixelCoord> BinaryMask::set_pixels() const {
    std::vector<PixelCoord> out;
    for (int v = 0; v < height_; ++v) {
        for (int u = 0; u < width_; ++u) {
            if (at(u, v)) {
                out.push_back({u, v});
            }
        }
    }
    return out;
}

BinaryMask BinaryMask::complement() const {
    BinaryMask out = *this;
    for (auto& b : out.bits_) {
        b = b ? 0 : 1;
    }
    return out;
}

BinaryMask BinaryMask::dilate(int radius) const {
    if (radius <= 0) {
        return *this;
    }
    // Separable: horizontal pass then vertical pass.
    BinaryMask rows(width_, height_);
    for (int v = 0; v < height_; ++v) {
        for (int u = 0; u < width_; ++u) {
            if (!at(u, v)) {
                continue;
            }
            for (int du = std::max(0, u - radius); du <= std::min(width_ - 1, u + radius); ++du) {
                rows.set(du, v);
            }
        }
    }
    BinaryMask out(width_, height_);
    for (int v = 0; v < height_; ++v) {
        for (int u = 0; u < width_; ++u) {
            if (!rows.at(u, v)) {
                continue;
            }
            for (int dv = std::max(0, v - radius); dv <= std::min(height_ - 1, v + radius); ++dv) {
                out.set(u, dv);
            }
        }
    }
    return out;
}

BinaryMask BinaryMask::intersect(const BinaryMask& other) const {
    if (!same_shape(other)) {
        throw Error(ErrorCode::DimensionMismatch, "mask intersection of different shapes");
    }
    BinaryMask out = *this;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        out.bits_[i] = bits_[i] & other.bits_[i];
    }
    return out;
}

BinaryMask BinaryMask::unite(const BinaryMask& other) const {
    if (!same_shape(other)) {
        throw Error(ErrorCode::DimensionMismatch, "mask union of different shapes");
    }
    BinaryMask out = *this;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        out.bits_[i] = bits_[i] | other.bits_[i];
    }
    return out;
}

DepthMap::DepthMap(int width, int height, std::vector<float> values)
    : width_(width), height_(height), values_(std::move(values)) {
    check_dims(width, height, values_.size(), "depth map");
    for (float d : values_) {
        if (std::isfinite(d) && d < 0.0F) {
            throw Error(ErrorCode::InvalidArgument, "depth map has a negative value");
        }
    }
}

DepthMap::DepthMap(int width, int height, float fill)
    : DepthMap(width, height,
               std::vector<float>(static_cast<std::size_t>(std::max(width, 0)) *
                                      static_cast<std::size_t>(std::max(height, 0)),
                                  fill)) {}

bool DepthMap::valid(int u, int v) const {
    const float d = at(u, v);
    return std::isfinite(d) && d > 0.0F;
}

BinaryMask DepthMap::validity() const {
    BinaryMask out(width_, height_);
    for (int v = 0; v < height_; ++v) {
        for (int u = 0; u < width_; ++u) {
            out.set(u, v, valid(u, v));
        }
    }
    return out;
}

bool operator==(const DepthMap& a, const DepthMap& b) {
    // Bitwise, so NaN regions compare equal to themselves.
    return a.width_ == b.width_ && a.height_ == b.height_ &&
           std::memcmp(a.values_.data(), b.values_.data(), a.values_.size() * sizeof(float)) == 0;
}

RgbImage::RgbImage(int width, int height, std::vector<std::uint8_t> rgb)
    : width_(width), height_(height), rgb_(std::move(rgb)) {
    check_dims(width, height, rgb_.size() / 3, "rgb image");
    if (rgb_.size() % 3 != 0) {
        throw Error(ErrorCode::DimensionMismatch, "rgb buffer is not a multiple of 3");
    }
}

RgbImage::RgbImage(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b)
    : width_(width), height_(height) {
    rgb_.reserve(3 * static_cast<std::size_t>(width) * height);
    for (int i = 0; i < width * height; ++i) {
        rgb_.push_back(r);
        rgb_.push_back(g);
        rgb_.push_back(b);
    }
}

RgbImage mask_background(const RgbImage& image, const BinaryMask& keep, std::uint8_t fill) {
    if (image.width() != keep.width() || image.height() != keep.height()) {
        throw Error(ErrorCode::DimensionMismatch, "background mask does not match image");
    }
    RgbImage out = image;
    for (int v = 0; v < image.height(); ++v) {
        for (int u = 0; u < image.width(); ++u) {
            if (!keep.at(u, v)) {
                std::uint8_t* px = out.pixel(u, v);
                px[0] = px[1] = px[2] = fill;
            }
        }
    }
    return out;
}

void CameraIntrinsics::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy) || !std::isfinite(cx) ||
        !std::isfinite(cy)) {
        throw Error(ErrorCode::InvalidArgument, "camera focal lengths must be positive and finite");
    }
}

}  // namespace vlad::lifting
