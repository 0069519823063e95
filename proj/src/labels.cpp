// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#include "ssckit/labels.hpp"

#include <algorithm>

#include "ssckit/error.hpp"
#include "ssckit/parallel.hpp"
#include "ssckit/voxelize.hpp"

namespace ssc {

std::vector<PoseSE3> transforms_to_first(const std::vector<PoseSE3>& poses) {
    if (poses.empty()) throw ArgumentError("pose list is empty");
    std::vector<PoseSE3> out;
    out.reserve(poses.size());
    const PoseSE3 inv0 = poses[0].inverse();
    out.push_back(PoseSE3::identity());  // exact, not inv0 * poses[0]
    for (std::size_t k = 1; k < poses.size(); ++k)
        out.push_back(inv0.compose(poses[k]));
    return out;
}

VoxelLabelGrid aggregate_completion_labels(const std::vector<LabeledFrame>& frames,
                                           const std::vector<PoseSE3>& transforms,
                                           const GridSpec& spec, int threads) {
    if (frames.empty()) throw ArgumentError("aggregation needs at least one frame");
    if (frames.size() != transforms.size())
        throw ArgumentError("frame count (" + std::to_string(frames.size()) +
                            ") does not match transform count (" +
                            std::to_string(transforms.size()) + ")");
    spec.validate();
    for (const LabeledFrame& frame : frames) {
        if (frame.labels.size() != frame.cloud.size())
            throw ArgumentError("frame label count does not match point count");
    }

    // Votes are generated per frame, then concatenated in frame order. The
    // final tally sorts everything, so the result is identical for any thread
    // count; frame-ordered concatenation keeps intermediates reproducible too.
    std::vector<std::vector<VoxelVote>> per_frame(frames.size());
    parallel_for(frames.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t f = begin; f < end; ++f)
            append_votes(frames[f].cloud, frames[f].labels.semantic, spec,
                         transforms[f], per_frame[f]);
    });

    std::vector<VoxelVote> votes;
    std::size_t total = 0;
    for (const auto& v : per_frame) total += v.size();
    votes.reserve(total);
    for (const auto& v : per_frame) votes.insert(votes.end(), v.begin(), v.end());
    return tally_majority(std::move(votes), spec);
}

std::vector<InstanceCube> instance_cubes(const PointCloud& cloud,
                                         const FrameLabels& labels,
                                         std::uint16_t class_id, const GridSpec& spec) {
    if (labels.size() != cloud.size() || labels.instance.size() != cloud.size())
        throw ArgumentError("frame label count does not match point count");
    // std::map keys the cubes by instance id, giving the documented order and
    // making the result independent of point order.
    std::map<std::uint16_t, InstanceCube> cubes;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (labels.semantic[i] != class_id) continue;
        const auto v = voxelize_point(cloud.points[i].cast<double>(), spec);
        if (!v) continue;
        auto it = cubes.find(labels.instance[i]);
        if (it == cubes.end()) {
            InstanceCube cube;
            cube.semantic = class_id;
            cube.instance = labels.instance[i];
            cube.min = cube.max = *v;
            cubes.emplace(labels.instance[i], cube);
        } else {
            InstanceCube& cube = it->second;
            cube.min.x = std::min(cube.min.x, v->x);
            cube.min.y = std::min(cube.min.y, v->y);
            cube.min.z = std::min(cube.min.z, v->z);
            cube.max.x = std::max(cube.max.x, v->x);
            cube.max.y = std::max(cube.max.y, v->y);
            cube.max.z = std::max(cube.max.z, v->z);
        }
    }
    std::vector<InstanceCube> out;
    out.reserve(cubes.size());
    for (const auto& [id, cube] : cubes) out.push_back(cube);
    return out;
}

RectifyStats rectify(VoxelLabelGrid& grid, const LabeledFrame& frame,
                     const RectifyConfig& config, int threads) {
    std::vector<InstanceCube> cubes;
    for (std::uint16_t cls : config.moving_classes) {
        const auto class_cubes = instance_cubes(frame.cloud, frame.labels, cls, grid.spec);
        cubes.insert(cubes.end(), class_cubes.begin(), class_cubes.end());
    }
    return rectify_with_cubes(grid, cubes, config, threads);
}

RectifyStats rectify_with_cubes(VoxelLabelGrid& grid,
                                const std::vector<InstanceCube>& cubes,
                                const RectifyConfig& config, int threads) {
    grid.spec.validate();
    if (config.unlabeled_class < grid.spec.num_classes)
        throw ArgumentError("unlabeled_class must lie outside the class id range");
    for (std::uint16_t cls : config.moving_classes) {
        if (cls == grid.spec.empty_label || cls >= grid.spec.num_classes)
            throw ArgumentError("moving class id out of range");
    }
    for (const InstanceCube& cube : cubes) {
        if (!config.moving_classes.count(cube.semantic))
            throw ArgumentError("instance cube class is not a moving class");
        if (!(cube.min.x <= cube.max.x && cube.min.y <= cube.max.y &&
              cube.min.z <= cube.max.z))
            throw ArgumentError("instance cube min exceeds max");
        if (!grid.spec.contains(cube.min) || !grid.spec.contains(cube.max))
            throw ArgumentError("instance cube outside the grid");
    }

    const std::vector<std::uint16_t> classes(config.moving_classes.begin(),
                                             config.moving_classes.end());
    std::vector<std::size_t> removed(classes.size(), 0);

    // Work splits by moving class: each class touches only voxels carrying its
    // own label, so threads never write the same cell and the outcome is
    // independent of the partition.
    parallel_for(classes.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t ci = begin; ci < end; ++ci) {
            const std::uint16_t cls = classes[ci];
            std::vector<const InstanceCube*> class_cubes;
            for (const InstanceCube& cube : cubes)
                if (cube.semantic == cls) class_cubes.push_back(&cube);
            std::size_t count = 0;
            for (std::size_t lin = 0; lin < grid.labels.size(); ++lin) {
                if (grid.labels[lin] != cls) continue;
                const VoxelIndex v = grid.spec.from_linear(lin);
                bool keep = false;
                for (const InstanceCube* cube : class_cubes) {
                    if (cube->contains(v)) {
                        keep = true;
                        break;
                    }
                }
                if (!keep) {
                    grid.labels[lin] = config.unlabeled_class;
                    ++count;
                }
            }
            removed[ci] = count;
        }
    });

    RectifyStats stats;
    for (std::size_t ci = 0; ci < classes.size(); ++ci)
        stats.removed_per_class[classes[ci]] = removed[ci];
    return stats;
}

}  // namespace ssc
