// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#include "ssckit/voxelize.hpp"

#include <algorithm>
#include <cmath>

#include "ssckit/error.hpp"

namespace ssc {

GridSpec default_grid_spec() {
    GridSpec spec;
    spec.origin = Eigen::Vector3d(0.0, -25.6, -2.0);
    spec.extent = Eigen::Vector3d(51.2, 51.2, 6.4);
    spec.dims = {256, 256, 32};
    spec.num_classes = 20;
    spec.empty_label = 0;
    spec.ignore_label = kIgnoreLabel;
    return spec;
}

std::optional<VoxelIndex> voxelize_point(const Eigen::Vector3d& point,
                                         const GridSpec& spec) {
    const Eigen::Vector3d size = spec.voxel_size();
    VoxelIndex v{};
    std::int32_t* idx[3] = {&v.x, &v.y, &v.z};
    for (int a = 0; a < 3; ++a) {
        const double cell = std::floor((point(a) - spec.origin(a)) / size(a));
        if (cell < 0.0 || cell >= static_cast<double>(spec.dims[a]))
            return std::nullopt;
        *idx[a] = static_cast<std::int32_t>(cell);
    }
    return v;
}

void append_votes(const PointCloud& cloud, const std::vector<std::uint16_t>& semantic,
                  const GridSpec& spec, const PoseSE3& transform,
                  std::vector<VoxelVote>& out) {
    if (semantic.size() != cloud.size())
        throw ArgumentError("semantic label count does not match point count");
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (semantic[i] == spec.ignore_label) continue;
        const Eigen::Vector3d p = transform.apply(cloud.points[i].cast<double>());
        if (auto v = voxelize_point(p, spec)) out.push_back({*v, semantic[i]});
    }
}

VoxelLabelGrid tally_majority(std::vector<VoxelVote> votes, const GridSpec& spec) {
    spec.validate();
    for (const VoxelVote& vote : votes) {
        if (!spec.contains(vote.voxel)) throw ArgumentError("vote voxel out of bounds");
        if (vote.label >= spec.num_classes)
            throw ArgumentError("vote label out of range");
    }
    // Sorting groups votes by voxel and, within a voxel, by ascending label.
    // A single run scan then finds the longest run; on equal counts the lower
    // label id is seen first and kept, which is the tie rule we want.
    std::sort(votes.begin(), votes.end());
    VoxelLabelGrid grid(spec);
    std::size_t i = 0;
    while (i < votes.size()) {
        const VoxelIndex voxel = votes[i].voxel;
        std::uint16_t best_label = votes[i].label;
        std::size_t best_count = 0;
        while (i < votes.size() && votes[i].voxel == voxel) {
            const std::uint16_t label = votes[i].label;
            std::size_t count = 0;
            while (i < votes.size() && votes[i].voxel == voxel && votes[i].label == label) {
                ++count;
                ++i;
            }
            if (count > best_count) {
                best_count = count;
                best_label = label;
            }
        }
        grid.at(voxel) = best_label;
    }
    return grid;
}

VoxelLabelGrid voxelize_labels(const PointCloud& cloud,
                               const std::vector<std::uint16_t>& semantic,
                               const GridSpec& spec) {
    std::vector<VoxelVote> votes;
    append_votes(cloud, semantic, spec, PoseSE3::identity(), votes);
    return tally_majority(std::move(votes), spec);
}

SparseVoxelTensor sparsify(const FeatureVolume& volume, double epsilon) {
    if (epsilon < 0.0) throw ArgumentError("sparsify epsilon must be >= 0");
    SparseVoxelTensor tensor;
    tensor.dims = volume.dims;
    std::vector<VoxelIndex> kept;
    for (std::int32_t x = 0; x < volume.dims[0]; ++x) {
        for (std::int32_t y = 0; y < volume.dims[1]; ++y) {
            for (std::int32_t z = 0; z < volume.dims[2]; ++z) {
                double max_abs = 0.0;
                for (std::int32_t c = 0; c < volume.channels; ++c)
                    max_abs = std::max(max_abs, std::abs(volume.at(x, y, z, c)));
                if (max_abs > epsilon) kept.push_back({x, y, z});
            }
        }
    }
    tensor.indices = std::move(kept);
    tensor.features.resize(static_cast<Eigen::Index>(tensor.indices.size()),
                           volume.channels);
    for (std::size_t i = 0; i < tensor.indices.size(); ++i) {
        const VoxelIndex& v = tensor.indices[i];
        for (std::int32_t c = 0; c < volume.channels; ++c)
            tensor.features(static_cast<Eigen::Index>(i), c) = volume.at(v.x, v.y, v.z, c);
    }
    return tensor;
}

FeatureVolume densify(const SparseVoxelTensor& tensor) {
    tensor.validate();
    FeatureVolume volume(tensor.dims, static_cast<std::int32_t>(tensor.feature_dim()));
    for (std::size_t i = 0; i < tensor.size(); ++i) {
        const VoxelIndex& v = tensor.indices[i];
        for (Eigen::Index c = 0; c < tensor.features.cols(); ++c)
            volume.at(v.x, v.y, v.z, static_cast<std::int32_t>(c)) =
                tensor.features(static_cast<Eigen::Index>(i), c);
    }
    return volume;
}

}  // namespace ssc
