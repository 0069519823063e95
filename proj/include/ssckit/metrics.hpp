// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ssckit/grid.hpp"

namespace ssc {

/// Voxel-count confusion matrix; rows index ground truth, columns prediction.
struct ConfusionMatrix {
    std::uint16_t num_classes = 0;
    std::vector<std::uint64_t> counts;  // num_classes^2, row-major

    ConfusionMatrix() = default;
    explicit ConfusionMatrix(std::uint16_t c)
        : num_classes(c), counts(static_cast<std::size_t>(c) * c, 0) {}

    std::uint64_t at(std::uint16_t gt, std::uint16_t pred) const {
        return counts[static_cast<std::size_t>(gt) * num_classes + pred];
    }
    std::uint64_t& at(std::uint16_t gt, std::uint16_t pred) {
        return counts[static_cast<std::size_t>(gt) * num_classes + pred];
    }

    std::uint64_t total() const {
        std::uint64_t n = 0;
        for (std::uint64_t v : counts) n += v;
        return n;
    }

    /// Elementwise add, so per-scene matrices can be reduced in any order.
    void merge(const ConfusionMatrix& other);
};

/// Adds every voxel with gt != ignore as counts[gt][pred] += 1. Ignored
/// ground-truth voxels are skipped entirely.
///
/// Throws ArgumentError on dim or class-count mismatch; DataError when a
/// prediction carries the ignore sentinel at an evaluated voxel.
void accumulate(const VoxelLabelGrid& pred, const VoxelLabelGrid& gt,
                ConfusionMatrix& cm);

/// TP/(TP+FP+FN) for class i, or nullopt when the class never occurs
/// (TP+FP+FN = 0).
std::optional<double> class_iou(const ConfusionMatrix& cm, std::uint16_t i);

/// All class ids except `empty_label` — the default mIoU class set.
std::vector<std::uint16_t> semantic_class_set(std::uint16_t num_classes,
                                              std::uint16_t empty_label);

/// Mean IoU over `class_set`. Absent classes (TP+FP+FN = 0) are excluded
/// from the mean by default; with absent_as_zero they count as 0.
///
/// Throws UndefinedError when no class in the set occurs at all.
double miou(const ConfusionMatrix& cm, const std::vector<std::uint16_t>& class_set,
            bool absent_as_zero = false);

/// Relabels to a 2-class grid: 0 = empty, 1 = occupied (any semantic class).
/// Ignore-labeled voxels stay ignored.
VoxelLabelGrid binarize_occupancy(const VoxelLabelGrid& grid);

/// Class-agnostic IoU: both grids binarized to occupied/empty, ignore-gt
/// voxels skipped, IoU of the occupied class returned. Two grids that are
/// both entirely empty agree perfectly, so the result is defined as 1.
double completion_iou(const VoxelLabelGrid& pred, const VoxelLabelGrid& gt);

/// Human-readable table plus a machine-readable key=value block: per-class
/// IoU rows in class-id order, then miou and completion_iou entries.
/// class_names[i] names class i and must cover num_classes entries; a class
/// absent from the data reports "absent" in the table (and is skipped or
/// zeroed per absent_as_zero).
std::string metrics_report(const ConfusionMatrix& cm,
                           const std::vector<std::string>& class_names,
                           std::uint16_t empty_label, bool absent_as_zero,
                           std::optional<double> completion);

}  // namespace ssc
