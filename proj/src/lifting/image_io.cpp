#include "vlad/lifting/image_io.hpp"

#include "vlad/error.hpp"

#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace vlad::lifting {

namespace {

struct Decoded {
    int width = 0;
    int height = 0;
    int channels = 0;
    int bit_depth = 8;
    std::vector<std::uint16_t> samples;
};

struct ReadCursor {
    std::span<const std::uint8_t> data;
    std::size_t offset = 0;
};

void read_callback(png_structp png, png_bytep out, png_size_t length) {
    auto* cursor = static_cast<ReadCursor*>(png_get_io_ptr(png));
    if (cursor->offset + length > cursor->data.size()) {
        png_error(png, "read past end of buffer");
    }
    std::memcpy(out, cursor->data.data() + cursor->offset, length);
    cursor->offset += length;
}

void write_callback(png_structp png, png_bytep data, png_size_t length) {
    auto* out = static_cast<Bytes*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + length);
}

void flush_callback(png_structp) {}

void quiet_warning(png_structp, png_const_charp) {}

// No C++ objects with destructors live in the setjmp frames below; buffers are
// owned by the callers.
bool decode_into(ReadCursor& cursor, Decoded& out, std::vector<png_bytep>& rows, Bytes& raw) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, quiet_warning);
    if (png == nullptr) {
        return false;
    }
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        return false;
    }
    png_set_read_fn(png, &cursor, read_callback);
    png_read_info(png, info);

    const png_byte color_type = png_get_color_type(png, info);
    const png_byte depth = png_get_bit_depth(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) {
        png_set_palette_to_rgb(png);
    }
    if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
    }
    if ((color_type & PNG_COLOR_MASK_ALPHA) != 0) {
        png_set_strip_alpha(png);
    }
    png_read_update_info(png, info);

    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.channels = png_get_channels(png, info);
    out.bit_depth = png_get_bit_depth(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);

    raw.resize(rowbytes * static_cast<std::size_t>(out.height));
    rows.resize(static_cast<std::size_t>(out.height));
    for (int r = 0; r < out.height; ++r) {
        rows[static_cast<std::size_t>(r)] = raw.data() + rowbytes * static_cast<std::size_t>(r);
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

Decoded decode(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
        throw Error(ErrorCode::Io, "not a PNG stream");
    }
    ReadCursor cursor{bytes, 0};
    Decoded out;
    std::vector<png_bytep> rows;
    Bytes raw;
    if (!decode_into(cursor, out, rows, raw)) {
        throw Error(ErrorCode::Io, "corrupt PNG stream");
    }
    const std::size_t count = static_cast<std::size_t>(out.width) * out.height * out.channels;
    out.samples.resize(count);
    if (out.bit_depth == 16) {
        for (std::size_t i = 0; i < count; ++i) {
            out.samples[i] = static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            out.samples[i] = raw[i];
        }
    }
    return out;
}

bool encode_into(Bytes& out, int width, int height, int color_type, int bit_depth, std::vector<png_bytep>& rows) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, quiet_warning);
    if (png == nullptr) {
        return false;
    }
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
        png_destroy_write_struct(&png, nullptr);
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        return false;
    }
    png_set_write_fn(png, &out, write_callback, flush_callback);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth,
                 color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

Bytes encode(int width, int height, int color_type, int bit_depth, Bytes& raw) {
    if (width <= 0 || height <= 0) {
        throw Error(ErrorCode::InvalidArgument, "cannot encode an empty image");
    }
    const std::size_t rowbytes = raw.size() / static_cast<std::size_t>(height);
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    for (int r = 0; r < height; ++r) {
        rows[static_cast<std::size_t>(r)] = raw.data() + rowbytes * static_cast<std::size_t>(r);
    }
    Bytes out;
    if (!encode_into(out, width, height, color_type, bit_depth, rows)) {
        throw Error(ErrorCode::Io, "PNG encoding failed");
    }
    return out;
}

}  // namespace

RgbImage decode_rgb_png(std::span<const std::uint8_t> png) {
    const Decoded d = decode(png);
    std::vector<std::uint8_t> rgb;
    rgb.reserve(static_cast<std::size_t>(d.width) * d.height * 3);
    const int shift = d.bit_depth == 16 ? 8 : 0;
    for (std::size_t p = 0; p < static_cast<std::size_t>(d.width) * d.height; ++p) {
        for (int c = 0; c < 3; ++c) {
            const int src = d.channels >= 3 ? c : 0;
            rgb.push_back(static_cast<std::uint8_t>(d.samples[p * d.channels + src] >> shift));
        }
    }
    return RgbImage(d.width, d.height, std::move(rgb));
}

Bytes encode_rgb_png(const RgbImage& image) {
    Bytes raw = image.data();
    return encode(image.width(), image.height(), PNG_COLOR_TYPE_RGB, 8, raw);
}

BinaryMask decode_mask_png(std::span<const std::uint8_t> png) {
    const Decoded d = decode(png);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(d.width) * d.height, 0);
    for (std::size_t p = 0; p < bits.size(); ++p) {
        for (int c = 0; c < d.channels; ++c) {
            if (d.samples[p * d.channels + c] != 0) {
                bits[p] = 1;
            }
        }
    }
    return BinaryMask(d.width, d.height, std::move(bits));
}

Bytes encode_mask_png(const BinaryMask& mask) {
    Bytes raw(mask.bits().size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        raw[i] = mask.bits()[i] ? 255 : 0;
    }
    return encode(mask.width(), mask.height(), PNG_COLOR_TYPE_GRAY, 8, raw);
}

DepthMap decode_depth_png_mm(std::span<const std::uint8_t> png) {
    const Decoded d = decode(png);
    if (d.channels != 1) {
        throw Error(ErrorCode::Io, "depth PNG must be single-channel");
    }
    std::vector<float> meters(d.samples.size());
    for (std::size_t i = 0; i < meters.size(); ++i) {
        meters[i] = static_cast<float>(d.samples[i]) / 1000.0F;
    }
    return DepthMap(d.width, d.height, std::move(meters));
}

Bytes encode_depth_png_mm(const DepthMap& depth_m) {
    Bytes raw;
    raw.reserve(depth_m.values().size() * 2);
    for (float m : depth_m.values()) {
        long mm = 0;
        if (std::isfinite(m) && m > 0.0F) {
            mm = std::lround(static_cast<double>(m) * 1000.0);
            if (mm > 65535) {
                throw Error(ErrorCode::InvalidArgument, "depth exceeds the 16-bit millimeter range");
            }
        }
        raw.push_back(static_cast<std::uint8_t>((mm >> 8) & 0xFF));
        raw.push_back(static_cast<std::uint8_t>(mm & 0xFF));
    }
    return encode(depth_m.width(), depth_m.height(), PNG_COLOR_TYPE_GRAY, 16, raw);
}

DepthMap decode_depth_f32(std::span<const std::uint8_t> raw) {
    if (raw.size() < 8) {
        throw Error(ErrorCode::Io, "f32 raster: truncated header");
    }
    std::uint32_t w = 0, h = 0;
    std::memcpy(&w, raw.data(), 4);
    std::memcpy(&h, raw.data() + 4, 4);
    const std::size_t count = static_cast<std::size_t>(w) * h;
    if (raw.size() != 8 + 4 * count) {
        throw Error(ErrorCode::DimensionMismatch, "f32 raster: payload does not match header dimensions");
    }
    std::vector<float> values(count);
    std::memcpy(values.data(), raw.data() + 8, 4 * count);
    return DepthMap(static_cast<int>(w), static_cast<int>(h), std::move(values));
}

Bytes encode_depth_f32(const DepthMap& depth) {
    Bytes out(8 + 4 * depth.values().size());
    const auto w = static_cast<std::uint32_t>(depth.width());
    const auto h = static_cast<std::uint32_t>(depth.height());
    std::memcpy(out.data(), &w, 4);
    std::memcpy(out.data() + 4, &h, 4);
    std::memcpy(out.data() + 8, depth.values().data(), 4 * depth.values().size());
    return out;
}

Bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

RgbImage read_rgb_png(const std::filesystem::path& path) { return decode_rgb_png(read_file(path)); }
void write_rgb_png(const std::filesystem::path& path, const RgbImage& image) {
    write_file(path, encode_rgb_png(image));
}
BinaryMask read_mask_png(const std::filesystem::path& path) { return decode_mask_png(read_file(path)); }
void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask) {
    write_file(path, encode_mask_png(mask));
}
DepthMap read_depth_png_mm(const std::filesystem::path& path) { return decode_depth_png_mm(read_file(path)); }
void write_depth_png_mm(const std::filesystem::path& path, const DepthMap& depth_m) {
    write_file(path, encode_depth_png_mm(depth_m));
}
DepthMap read_depth_f32(const std::filesystem::path& path) { return decode_depth_f32(read_file(path)); }
void write_depth_f32(const std::filesystem::path& path, const DepthMap& depth) {
    write_file(path, encode_depth_f32(depth));
}

DepthMap read_depth(const std::filesystem::path& path) {
    return path.extension() == ".f32" ? read_depth_f32(path) : read_depth_png_mm(path);
}

}  // namespace vlad::lifting
