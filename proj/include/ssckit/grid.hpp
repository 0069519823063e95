// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <vector>

#include "ssckit/error.hpp"
#include "ssckit/types.hpp"

namespace ssc {

/// Voxel-space geometry: world-frame origin of the lower grid corner,
/// per-axis extent in meters, integer dims (L, W, H), and the label
/// alphabet (class count plus the empty/ignore conventions).
struct GridSpec {
    Eigen::Vector3d origin = Eigen::Vector3d::Zero();
    Eigen::Vector3d extent = Eigen::Vector3d::Ones();
    std::array<std::int32_t, 3> dims = {1, 1, 1};
    std::uint16_t num_classes = 2;
    std::uint16_t empty_label = 0;
    std::uint16_t ignore_label = kIgnoreLabel;

    Eigen::Vector3d voxel_size() const {
        return {extent.x() / dims[0], extent.y() / dims[1], extent.z() / dims[2]};
    }

    std::size_t voxel_count() const {
        return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    }

    bool contains(const VoxelIndex& v) const {
        return v.x >= 0 && v.x < dims[0] && v.y >= 0 && v.y < dims[1] &&
               v.z >= 0 && v.z < dims[2];
    }

    /// Linear index, x-major: x·(W·H) + y·H + z.
    std::size_t linear_index(const VoxelIndex& v) const {
        return (static_cast<std::size_t>(v.x) * dims[1] + v.y) * dims[2] + v.z;
    }

    VoxelIndex from_linear(std::size_t lin) const {
        const std::size_t wh = static_cast<std::size_t>(dims[1]) * dims[2];
        return {static_cast<std::int32_t>(lin / wh),
                static_cast<std::int32_t>((lin % wh) / dims[2]),
                static_cast<std::int32_t>(lin % dims[2])};
    }

    void validate() const;
};

/// Dense L×W×H grid of voxel class labels (the completion label volume).
struct VoxelLabelGrid {
    GridSpec spec;
    std::vector<std::uint16_t> labels;  // spec.voxel_count() entries, x-major

    VoxelLabelGrid() = default;
    explicit VoxelLabelGrid(const GridSpec& s)
        : spec(s), labels(s.voxel_count(), s.empty_label) {}

    std::uint16_t at(const VoxelIndex& v) const { return labels[spec.linear_index(v)]; }
    std::uint16_t& at(const VoxelIndex& v) { return labels[spec.linear_index(v)]; }

    std::size_t occupied_count() const {
        std::size_t n = 0;
        for (std::uint16_t l : labels)
            if (l != spec.empty_label && l != spec.ignore_label) ++n;
        return n;
    }

    bool operator==(const VoxelLabelGrid& o) const {
        return spec.dims == o.spec.dims && labels == o.labels;
    }
};

/// Dense L×W×H×C feature volume, x-major with channels innermost.
struct FeatureVolume {
    std::array<std::int32_t, 3> dims = {0, 0, 0};
    std::int32_t channels = 0;
    std::vector<double> data;

    FeatureVolume() = default;
    FeatureVolume(std::array<std::int32_t, 3> d, std::int32_t c)
        : dims(d),
          channels(c),
          data(static_cast<std::size_t>(d[0]) * d[1] * d[2] * c, 0.0) {}

    std::size_t voxel_count() const {
        return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    }

    std::size_t offset(std::int32_t x, std::int32_t y, std::int32_t z) const {
        return ((static_cast<std::size_t>(x) * dims[1] + y) * dims[2] + z) * channels;
    }

    double at(std::int32_t x, std::int32_t y, std::int32_t z, std::int32_t c) const {
        return data[offset(x, y, z) + c];
    }
    double& at(std::int32_t x, std::int32_t y, std::int32_t z, std::int32_t c) {
        return data[offset(x, y, z) + c];
    }
};

/// Non-empty voxel features with their integer indices. Indices are kept
/// strictly increasing in lexicographic (x, y, z) order; features is
/// N×C_f with row i belonging to indices[i].
struct SparseVoxelTensor {
    std::array<std::int32_t, 3> dims = {0, 0, 0};
    std::vector<VoxelIndex> indices;
    Eigen::MatrixXd features;  // N x C_f

    std::size_t size() const { return indices.size(); }
    std::int32_t feature_dim() const { return static_cast<std::int32_t>(features.cols()); }

    /// Checks the sorted/in-bounds/shape invariants with a linear scan.
    void validate() const;
};

}  // namespace ssc
