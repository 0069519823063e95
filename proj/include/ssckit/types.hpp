// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <compare>
#include <cstdint>
#include <vector>

namespace ssc {

/// Label value excluded from losses and metrics. Rectified trace voxels
/// are relabeled to this sentinel.
inline constexpr std::uint16_t kIgnoreLabel = 255;

/// XYZ point cloud in sensor coordinates (meters), with optional
/// per-point intensity. Intensity, when present, has one entry per point.
struct PointCloud {
    std::vector<Eigen::Vector3f> points;
    std::vector<float> intensity;

    std::size_t size() const { return points.size(); }
    bool has_intensity() const { return !intensity.empty(); }

    bool operator==(const PointCloud&) const = default;
};

/// Per-point semantic class ids and panoptic instance ids for one frame.
/// Both vectors pair 1:1 with a PointCloud of the same frame.
struct FrameLabels {
    std::vector<std::uint16_t> semantic;
    std::vector<std::uint16_t> instance;

    std::size_t size() const { return semantic.size(); }

    bool operator==(const FrameLabels&) const = default;
};

/// Rigid transform (rotation + translation). Rotation is expected to be
/// orthonormal with determinant +1; check with is_valid() at a chosen
/// tolerance.
struct PoseSE3 {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    static PoseSE3 identity() { return {}; }

    Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
        return rotation * p + translation;
    }

    PoseSE3 inverse() const {
        PoseSE3 inv;
        inv.rotation = rotation.transpose();
        inv.translation = -(inv.rotation * translation);
        return inv;
    }

    /// this ∘ other: applies `other` first, then `this`.
    PoseSE3 compose(const PoseSE3& other) const {
        PoseSE3 out;
        out.rotation = rotation * other.rotation;
        out.translation = rotation * other.translation + translation;
        return out;
    }

    /// Max-abs deviation of RᵀR from the identity.
    double orthonormality_error() const {
        return (rotation.transpose() * rotation - Eigen::Matrix3d::Identity())
            .cwiseAbs()
            .maxCoeff();
    }

    bool is_valid(double tol) const {
        return orthonormality_error() <= tol &&
               std::abs(rotation.determinant() - 1.0) <= tol;
    }
};

/// Relative transform mapping frame `t+k` coordinates into frame `t`, given
/// the absolute poses of both frames.
inline PoseSE3 relative_transform(const PoseSE3& pose_t, const PoseSE3& pose_tk) {
    return pose_t.inverse().compose(pose_tk);
}

/// Integer voxel coordinate. Ordering is lexicographic in (x, y, z).
struct VoxelIndex {
    std::int32_t x = 0;
    std::int32_t y = 0;
    std::int32_t z = 0;

    auto operator<=>(const VoxelIndex&) const = default;
};

}  // namespace ssc
