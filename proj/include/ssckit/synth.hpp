// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ssckit/grid.hpp"
#include "ssckit/labels.hpp"
#include "ssckit/types.hpp"

namespace ssc {

/// One axis-aligned box with a per-frame center position. A single track
/// entry means the box is static across all frames (walls, ground slabs);
/// otherwise the track needs one center per frame.
struct BoxTrack {
    std::uint16_t class_id = 1;
    std::uint16_t instance_id = 1;
    Eigen::Vector3d extent = Eigen::Vector3d::Ones();   // edge lengths, meters
    std::vector<Eigen::Vector3d> track;                  // center per frame (world)
};

/// Declarative description of a synthetic scene.
struct SceneScript {
    std::vector<BoxTrack> objects;
    std::int32_t frame_count = 1;
    std::int32_t points_per_voxel = 1;  // samples per footprint voxel
    double margin = 0.05;               // inward sampling margin, meters
    std::uint64_t seed = 0;
    /// Sensor position per frame (world). Empty = static at the origin; a
    /// single entry = static at that position. Sensor rotation is identity:
    /// points are emitted as world minus sensor translation.
    std::vector<Eigen::Vector3d> sensor_track;
};

/// The exact voxels (frame-0 grid coordinates) one object covers per frame,
/// sorted lexicographically. This is the analytic ground truth that point
/// sampling is guaranteed to reproduce.
struct ObjectFootprints {
    std::uint16_t class_id = 0;
    std::uint16_t instance_id = 0;
    std::vector<std::vector<VoxelIndex>> per_frame;
};

struct GeneratedScene {
    std::vector<LabeledFrame> frames;   // points in each frame's sensor frame
    std::vector<PoseSE3> sensor_poses;  // sensor -> world, translation only
    std::vector<ObjectFootprints> footprints;  // one entry per script object
};

/// Deterministically samples the scene: for every object and frame, the box
/// is quantized to the voxels its margin-shrunk volume covers (clipped to
/// the grid), and points_per_voxel points are drawn inside each such voxel,
/// at least `margin` away from every voxel boundary. The margin absorbs all
/// float rounding in the store/transform/quantize chain, so every emitted
/// point voxelizes into its footprint voxel and the footprints are
/// independent of the seed. Identical script -> bit-identical output.
///
/// Throws ArgumentError on a degenerate box (extent <= 2*margin), a voxel
/// size <= 2*margin, a track that is neither 1 nor frame_count long, or an
/// object class that is not a semantic class of `spec`.
GeneratedScene generate(const SceneScript& script, const GridSpec& spec);

/// Parses the flat key=value scene format: frame_count, points_per_voxel,
/// margin, seed, sensor (';'-separated "x y z" triples), and one
/// object.<i>.{class,instance,extent,track} group per object. '#' starts a
/// comment. Throws FormatError on malformed lines, unknown keys, or gaps in
/// object numbering.
SceneScript parse_scene_script(const std::string& text);

}  // namespace ssc
