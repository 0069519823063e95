// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "ssckit/grid.hpp"
#include "ssckit/types.hpp"

namespace ssc {

/// Reads a point cloud stored as consecutive little-endian float32
/// (x, y, z, intensity) records, 16 bytes per point.
///
/// Throws FormatError (with the byte offset) when the file length is not a
/// multiple of 16, DataError (with the point index) on a non-finite
/// coordinate, IoError when the file cannot be opened.
PointCloud read_point_cloud(const std::string& path);

/// Writes the 16-byte-per-point binary layout above. Clouds without an
/// intensity channel are written with intensity 0.
void write_point_cloud(const PointCloud& cloud, const std::string& path);

/// Reads per-point labels stored as little-endian u32 words: semantic id in
/// the low 16 bits, instance id in the high 16 bits.
FrameLabels read_labels(const std::string& path);

/// Writes labels as (instance << 16) | semantic little-endian u32 words.
void write_labels(const FrameLabels& labels, const std::string& path);

/// Reads a pose-per-line text file: 12 whitespace-separated decimals per
/// nonempty line forming a row-major 3x4 [R | t] matrix. Line k holds the
/// pose of frame k relative to frame 0.
///
/// Throws FormatError (with the line number) on a malformed line and
/// DataError when a rotation deviates from orthonormality by more than 1e-3.
std::vector<PoseSE3> read_poses(const std::string& path);

/// Writes poses in the 12-number line format with 17 significant digits,
/// enough to reproduce each double exactly on re-read.
void write_poses(const std::vector<PoseSE3>& poses, const std::string& path);

/// Voxel label grid container: 8-byte magic "SSCVOXL1", three little-endian
/// u32 dims (L, W, H), then L*W*H little-endian u16 labels in x-major order
/// x*(W*H) + y*H + z.
void write_voxel_grid(const VoxelLabelGrid& grid, const std::string& path);

/// Reads the container above and validates it against `spec`: magic, dims,
/// payload size, and that every label is a class id or the ignore sentinel.
VoxelLabelGrid read_voxel_grid(const std::string& path, const GridSpec& spec);

/// Sparse voxel tensor container: 8-byte magic "SSCSPRS1", u32 dims
/// (L, W, H), u32 voxel count N, u32 feature channels C_f, then N
/// little-endian (u32 x, y, z) index triples in sorted order, then N*C_f
/// little-endian float32 feature values row by row.
void write_sparse_tensor(const SparseVoxelTensor& tensor, const std::string& path);
SparseVoxelTensor read_sparse_tensor(const std::string& path);

}  // namespace ssc
