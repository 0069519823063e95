// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "ssckit/grid.hpp"
#include "ssckit/types.hpp"

namespace ssc {

/// One frame of a sequence: points in the sensor frame plus per-point labels.
struct LabeledFrame {
    PointCloud cloud;
    FrameLabels labels;
};

/// Axis-aligned voxel bounding cube of one object instance; max is inclusive.
struct InstanceCube {
    std::uint16_t semantic = 0;
    std::uint16_t instance = 0;
    VoxelIndex min;
    VoxelIndex max;

    bool contains(const VoxelIndex& v) const {
        return v.x >= min.x && v.x <= max.x && v.y >= min.y && v.y <= max.y &&
               v.z >= min.z && v.z <= max.z;
    }
};

struct RectifyConfig {
    /// Class ids treated as movable objects (cleaned of motion traces).
    std::set<std::uint16_t> moving_classes;
    /// Replacement label for removed voxels; excluded from losses and metrics.
    std::uint16_t unlabeled_class = kIgnoreLabel;
};

struct RectifyStats {
    /// Voxels relabeled to the unlabeled class, keyed by moving class id.
    std::map<std::uint16_t, std::size_t> removed_per_class;

    std::size_t total_removed() const {
        std::size_t n = 0;
        for (const auto& [cls, count] : removed_per_class) n += count;
        return n;
    }
};

/// Computes, from absolute poses (frame k -> world), the transform list
/// mapping each frame into frame 0: pose_0^-1 * pose_k. Entry 0 comes out as
/// the identity up to rounding.
std::vector<PoseSE3> transforms_to_first(const std::vector<PoseSE3>& poses);

/// Builds the completion label grid for frame 0: each frame's points are
/// mapped through transforms[k] (frame k -> frame 0), concatenated, and
/// voxelized with a per-voxel majority vote (tie -> lowest class id).
/// transforms[0] is expected to be the identity. `threads` splits the
/// per-frame transform work; output is byte-identical for any thread count.
///
/// Throws ArgumentError when frames and transforms differ in length or a
/// frame's label count does not match its point count.
VoxelLabelGrid aggregate_completion_labels(const std::vector<LabeledFrame>& frames,
                                           const std::vector<PoseSE3>& transforms,
                                           const GridSpec& spec, int threads = 1);

/// Voxelizes the points of `class_id` and returns one inclusive bounding cube
/// per distinct panoptic instance id among them, ordered by instance id.
/// Instances whose points all fall outside the grid are omitted.
std::vector<InstanceCube> instance_cubes(const PointCloud& cloud,
                                         const FrameLabels& labels,
                                         std::uint16_t class_id, const GridSpec& spec);

/// Motion-trace cleanup over an aggregated grid, driven by one frame's
/// panoptic labels: for each moving class c, grid voxels labeled c survive
/// only inside the union of that class's instance cubes from `frame`; the
/// rest are relabeled to config.unlabeled_class. A class with no in-range
/// points in the frame loses every one of its grid voxels. Non-moving
/// classes are untouched. `threads` splits work by class; class voxel sets
/// are disjoint, so the result is independent of the partition.
RectifyStats rectify(VoxelLabelGrid& grid, const LabeledFrame& frame,
                     const RectifyConfig& config, int threads = 1);

/// Rectification core against precomputed cubes (all of which must belong to
/// moving classes). Exposed for tests that construct cube sets directly.
RectifyStats rectify_with_cubes(VoxelLabelGrid& grid,
                                const std::vector<InstanceCube>& cubes,
                                const RectifyConfig& config, int threads = 1);

}  // namespace ssc
