// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ssckit/grid.hpp"
#include "ssckit/types.hpp"

namespace ssc {

/// The standard completion volume: 51.2 m forward, +/-25.6 m lateral,
/// [-2, 4.4] m vertical, at 0.2 m resolution (256 x 256 x 32 voxels).
GridSpec default_grid_spec();

/// Maps a point (in grid frame) to its voxel via floor((p - origin) / voxel_size)
/// per axis, computed in double precision. Each voxel covers the half-open box
/// [origin + i*s, origin + (i+1)*s). Returns nullopt when the point falls
/// outside the grid extent on any axis.
std::optional<VoxelIndex> voxelize_point(const Eigen::Vector3d& point,
                                         const GridSpec& spec);

/// One semantic vote cast into a voxel by a point.
struct VoxelVote {
    VoxelIndex voxel;
    std::uint16_t label = 0;

    auto operator<=>(const VoxelVote&) const = default;
};

/// Transforms each point by `transform` (grid frame <- point frame), voxelizes,
/// and appends one vote per in-bounds point to `out`, preserving point order.
/// Points labeled with spec.ignore_label cast no vote.
void append_votes(const PointCloud& cloud, const std::vector<std::uint16_t>& semantic,
                  const GridSpec& spec, const PoseSE3& transform,
                  std::vector<VoxelVote>& out);

/// Majority vote per voxel. Voxels with no votes keep spec.empty_label; ties
/// break toward the numerically lowest class id. `votes` may be in any order.
VoxelLabelGrid tally_majority(std::vector<VoxelVote> votes, const GridSpec& spec);

/// Single-frame voxelization: identity transform, one cloud, majority vote.
VoxelLabelGrid voxelize_labels(const PointCloud& cloud,
                               const std::vector<std::uint16_t>& semantic,
                               const GridSpec& spec);

/// Extracts voxels whose feature vector has max-abs value > epsilon, in
/// lexicographic (x, y, z) index order.
SparseVoxelTensor sparsify(const FeatureVolume& volume, double epsilon);

/// Scatters a sparse tensor back to a dense volume; untouched cells are zero.
FeatureVolume densify(const SparseVoxelTensor& tensor);

}  // namespace ssc
