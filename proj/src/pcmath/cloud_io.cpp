#include "vlad/pcmath/cloud_io.hpp"

#include "vlad/binary_io.hpp"
#include "vlad/error.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

namespace vlad::pcmath {

PointCloud read_xyz(const std::filesystem::path& path, Frame frame, Role role) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    PointCloud cloud({}, frame, role);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        std::istringstream fields(line);
        double x = 0.0, y = 0.0, z = 0.0;
        if (!(fields >> x >> y >> z)) {
            throw Error(ErrorCode::Io, path.string() + ":" + std::to_string(line_no) + ": expected \"x y z\"");
        }
        cloud.points.emplace_back(x, y, z);
    }
    return cloud;
}

void write_xyz(const std::filesystem::path& path, const PointCloud& cloud) {
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    }
    out << std::setprecision(17);
    for (const auto& p : cloud.points) {
        out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    }
}

PointCloud read_binary_cloud(const std::filesystem::path& path, Frame frame, Role role) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    std::uint64_t count = 0;
    if (!binary_io::read_le(in, count)) {
        throw Error(ErrorCode::Io, path.string() + ": truncated header");
    }
    PointCloud cloud({}, frame, role);
    cloud.points.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        float xyz[3];
        for (float& v : xyz) {
            if (!binary_io::read_le(in, v)) {
                throw Error(ErrorCode::Io, path.string() + ": truncated point data");
            }
        }
        cloud.points.emplace_back(xyz[0], xyz[1], xyz[2]);
    }
    return cloud;
}

void write_binary_cloud(const std::filesystem::path& path, const PointCloud& cloud) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    }
    binary_io::write_le<std::uint64_t>(out, cloud.size());
    for (const auto& p : cloud.points) {
        binary_io::write_le(out, static_cast<float>(p.x()));
        binary_io::write_le(out, static_cast<float>(p.y()));
        binary_io::write_le(out, static_cast<float>(p.z()));
    }
}

PointCloud read_cloud(const std::filesystem::path& path, Frame frame, Role role) {
    const auto ext = path.extension().string();
    if (ext == ".bin" || ext == ".f32c") {
        return read_binary_cloud(path, frame, role);
    }
    return read_xyz(path, frame, role);
}

}  // namespace vlad::pcmath
