// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#include "ssckit/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "ssckit/error.hpp"

namespace ssc {

namespace {

constexpr char kVoxelMagic[8] = {'S', 'S', 'C', 'V', 'O', 'X', 'L', '1'};
constexpr char kSparseMagic[8] = {'S', 'S', 'C', 'S', 'P', 'R', 'S', '1'};

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    in.seekg(0, std::ios::end);
    const std::streamoff size = in.tellg();
    in.seekg(0, std::ios::beg);
    std::vector<std::uint8_t> buf(static_cast<std::size_t>(size));
    if (size > 0) in.read(reinterpret_cast<char*>(buf.data()), size);
    if (!in) throw IoError("failed reading file: " + path);
    return buf;
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& buf) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("failed writing file: " + path);
}

std::uint16_t get_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
}

float get_f32(const std::uint8_t* p) { return std::bit_cast<float>(get_u32(p)); }

void put_u16(std::vector<std::uint8_t>& buf, std::uint16_t v) {
    buf.push_back(static_cast<std::uint8_t>(v & 0xff));
    buf.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& buf, std::uint32_t v) {
    buf.push_back(static_cast<std::uint8_t>(v & 0xff));
    buf.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    buf.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    buf.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

void put_f32(std::vector<std::uint8_t>& buf, float v) {
    put_u32(buf, std::bit_cast<std::uint32_t>(v));
}

}  // namespace

PointCloud read_point_cloud(const std::string& path) {
    const auto buf = read_file(path);
    if (buf.size() % 16 != 0) {
        const std::size_t offset = buf.size() - buf.size() % 16;
        throw FormatError(path + ": truncated point record at byte offset " +
                          std::to_string(offset));
    }
    const std::size_t n = buf.size() / 16;
    PointCloud cloud;
    cloud.points.reserve(n);
    cloud.intensity.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t* rec = buf.data() + i * 16;
        const float x = get_f32(rec);
        const float y = get_f32(rec + 4);
        const float z = get_f32(rec + 8);
        if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
            throw DataError(path + ": non-finite coordinate at point index " +
                            std::to_string(i));
        }
        cloud.points.emplace_back(x, y, z);
        cloud.intensity.push_back(get_f32(rec + 12));
    }
    return cloud;
}

void write_point_cloud(const PointCloud& cloud, const std::string& path) {
    if (cloud.has_intensity() && cloud.intensity.size() != cloud.size())
        throw ArgumentError("intensity length does not match point count");
    std::vector<std::uint8_t> buf;
    buf.reserve(cloud.size() * 16);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        put_f32(buf, cloud.points[i].x());
        put_f32(buf, cloud.points[i].y());
        put_f32(buf, cloud.points[i].z());
        put_f32(buf, cloud.has_intensity() ? cloud.intensity[i] : 0.0f);
    }
    write_file(path, buf);
}

FrameLabels read_labels(const std::string& path) {
    const auto buf = read_file(path);
    if (buf.size() % 4 != 0) {
        throw FormatError(path + ": truncated label word at byte offset " +
                          std::to_string(buf.size() - buf.size() % 4));
    }
    const std::size_t n = buf.size() / 4;
    FrameLabels labels;
    labels.semantic.reserve(n);
    labels.instance.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t word = get_u32(buf.data() + i * 4);
        labels.semantic.push_back(static_cast<std::uint16_t>(word & 0xffff));
        labels.instance.push_back(static_cast<std::uint16_t>(word >> 16));
    }
    return labels;
}

void write_labels(const FrameLabels& labels, const std::string& path) {
    if (labels.semantic.size() != labels.instance.size())
        throw ArgumentError("semantic/instance length mismatch");
    std::vector<std::uint8_t> buf;
    buf.reserve(labels.size() * 4);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const std::uint32_t word =
            (static_cast<std::uint32_t>(labels.instance[i]) << 16) | labels.semantic[i];
        put_u32(buf, word);
    }
    write_file(path, buf);
}

std::vector<PoseSE3> read_poses(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);
    std::vector<PoseSE3> poses;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::vector<double> vals;
        double v = 0;
        while (fields >> v) vals.push_back(v);
        if (vals.empty() && fields.eof()) continue;  // blank line
        if (vals.size() != 12 || !fields.eof()) {
            throw FormatError(path + ": line " + std::to_string(line_no) +
                              ": expected 12 numeric fields");
        }
        PoseSE3 pose;
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) pose.rotation(r, c) = vals[r * 4 + c];
            pose.translation(r) = vals[r * 4 + 3];
        }
        if (!pose.is_valid(1e-3)) {
            throw DataError(path + ": line " + std::to_string(line_no) +
                            ": rotation is not orthonormal within 1e-3");
        }
        poses.push_back(pose);
    }
    return poses;
}

void write_poses(const std::vector<PoseSE3>& poses, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing: " + path);
    char num[64];
    for (const PoseSE3& pose : poses) {
        std::string line;
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 4; ++c) {
                const double v = c < 3 ? pose.rotation(r, c) : pose.translation(r);
                std::snprintf(num, sizeof(num), "%.17g", v);
                if (!line.empty()) line += ' ';
                line += num;
            }
        }
        out << line << '\n';
    }
    if (!out) throw IoError("failed writing file: " + path);
}

void write_voxel_grid(const VoxelLabelGrid& grid, const std::string& path) {
    if (grid.labels.size() != grid.spec.voxel_count())
        throw ArgumentError("grid label count does not match spec dims");
    std::vector<std::uint8_t> buf;
    buf.reserve(20 + grid.labels.size() * 2);
    buf.insert(buf.end(), kVoxelMagic, kVoxelMagic + 8);
    for (int a = 0; a < 3; ++a)
        put_u32(buf, static_cast<std::uint32_t>(grid.spec.dims[a]));
    for (std::uint16_t l : grid.labels) put_u16(buf, l);
    write_file(path, buf);
}

VoxelLabelGrid read_voxel_grid(const std::string& path, const GridSpec& spec) {
    const auto buf = read_file(path);
    if (buf.size() < 20) throw FormatError(path + ": header truncated");
    if (std::memcmp(buf.data(), kVoxelMagic, 8) != 0)
        throw FormatError(path + ": bad magic");
    std::uint32_t dims[3];
    for (int a = 0; a < 3; ++a) dims[a] = get_u32(buf.data() + 8 + 4 * a);

    std::uint64_t count = dims[0];
    for (int a = 1; a < 3; ++a) {
        if (dims[a] != 0 && count > std::numeric_limits<std::uint64_t>::max() / dims[a])
            throw FormatError(path + ": dim overflow");
        count *= dims[a];
    }
    if (count > std::numeric_limits<std::uint64_t>::max() / 2)
        throw FormatError(path + ": dim overflow");
    if (buf.size() - 20 != count * 2)
        throw FormatError(path + ": payload size mismatch (expected " +
                          std::to_string(count * 2) + " label bytes, got " +
                          std::to_string(buf.size() - 20) + ")");
    for (int a = 0; a < 3; ++a) {
        if (dims[a] != static_cast<std::uint32_t>(spec.dims[a])) {
            throw FormatError(path + ": grid dims " + std::to_string(dims[0]) + "x" +
                              std::to_string(dims[1]) + "x" + std::to_string(dims[2]) +
                              " do not match expected " + std::to_string(spec.dims[0]) +
                              "x" + std::to_string(spec.dims[1]) + "x" +
                              std::to_string(spec.dims[2]));
        }
    }

    VoxelLabelGrid grid(spec);
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint16_t l = get_u16(buf.data() + 20 + 2 * i);
        if (l >= spec.num_classes && l != spec.ignore_label) {
            throw DataError(path + ": label " + std::to_string(l) +
                            " out of range at linear index " + std::to_string(i));
        }
        grid.labels[i] = l;
    }
    return grid;
}

void write_sparse_tensor(const SparseVoxelTensor& tensor, const std::string& path) {
    tensor.validate();
    std::vector<std::uint8_t> buf;
    buf.insert(buf.end(), kSparseMagic, kSparseMagic + 8);
    for (int a = 0; a < 3; ++a) put_u32(buf, static_cast<std::uint32_t>(tensor.dims[a]));
    put_u32(buf, static_cast<std::uint32_t>(tensor.size()));
    put_u32(buf, static_cast<std::uint32_t>(tensor.feature_dim()));
    for (const VoxelIndex& v : tensor.indices) {
        put_u32(buf, static_cast<std::uint32_t>(v.x));
        put_u32(buf, static_cast<std::uint32_t>(v.y));
        put_u32(buf, static_cast<std::uint32_t>(v.z));
    }
    for (Eigen::Index i = 0; i < tensor.features.rows(); ++i)
        for (Eigen::Index c = 0; c < tensor.features.cols(); ++c)
            put_f32(buf, static_cast<float>(tensor.features(i, c)));
    write_file(path, buf);
}

SparseVoxelTensor read_sparse_tensor(const std::string& path) {
    const auto buf = read_file(path);
    if (buf.size() < 28) throw FormatError(path + ": header truncated");
    if (std::memcmp(buf.data(), kSparseMagic, 8) != 0)
        throw FormatError(path + ": bad magic");
    SparseVoxelTensor tensor;
    for (int a = 0; a < 3; ++a) {
        const std::uint32_t d = get_u32(buf.data() + 8 + 4 * a);
        if (d == 0 || d > static_cast<std::uint32_t>(std::numeric_limits<std::int32_t>::max()))
            throw FormatError(path + ": dim overflow");
        tensor.dims[a] = static_cast<std::int32_t>(d);
    }
    const std::uint64_t n = get_u32(buf.data() + 20);
    const std::uint64_t cf = get_u32(buf.data() + 24);
    if (cf == 0) throw FormatError(path + ": zero feature channels");
    const std::uint64_t expected = 28 + n * 12 + n * cf * 4;
    if (buf.size() != expected)
        throw FormatError(path + ": payload size mismatch (expected " +
                          std::to_string(expected) + " bytes, got " +
                          std::to_string(buf.size()) + ")");
    tensor.indices.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const std::uint8_t* p = buf.data() + 28 + i * 12;
        tensor.indices.push_back({static_cast<std::int32_t>(get_u32(p)),
                                  static_cast<std::int32_t>(get_u32(p + 4)),
                                  static_cast<std::int32_t>(get_u32(p + 8))});
    }
    tensor.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cf));
    const std::uint8_t* feat = buf.data() + 28 + n * 12;
    for (std::uint64_t i = 0; i < n; ++i) {
        for (std::uint64_t c = 0; c < cf; ++c) {
            const float v = get_f32(feat + (i * cf + c) * 4);
            if (!std::isfinite(v))
                throw DataError(path + ": non-finite feature at row " + std::to_string(i));
            tensor.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = v;
        }
    }
    try {
        tensor.validate();
    } catch (const Error& e) {
        throw DataError(path + ": " + e.what());
    }
    return tensor;
}

}  // namespace ssc
