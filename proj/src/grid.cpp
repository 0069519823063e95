// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#include "ssckit/grid.hpp"

#include <cmath>

#include "ssckit/error.hpp"

namespace ssc {

void GridSpec::validate() const {
    for (int a = 0; a < 3; ++a) {
        if (dims[a] <= 0) throw ArgumentError("grid dims must be positive");
        if (!(extent(a) > 0.0) || !std::isfinite(extent(a)))
            throw ArgumentError("grid extent must be positive and finite");
        if (!std::isfinite(origin(a)))
            throw ArgumentError("grid origin must be finite");
    }
    if (num_classes < 2) throw ArgumentError("need at least 2 classes (empty + one)");
    if (empty_label >= num_classes)
        throw ArgumentError("empty_label must be a valid class id");
    if (ignore_label < num_classes)
        throw ArgumentError("ignore_label must lie outside the class id range");
}

void SparseVoxelTensor::validate() const {
    for (int a = 0; a < 3; ++a)
        if (dims[a] <= 0) throw ArgumentError("sparse tensor dims must be positive");
    if (static_cast<Eigen::Index>(indices.size()) != features.rows())
        throw ArgumentError("sparse tensor index/feature row count mismatch");
    if (features.cols() < 1 && !indices.empty())
        throw ArgumentError("sparse tensor needs at least one feature channel");
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const VoxelIndex& v = indices[i];
        if (v.x < 0 || v.x >= dims[0] || v.y < 0 || v.y >= dims[1] || v.z < 0 ||
            v.z >= dims[2])
            throw ArgumentError("sparse tensor index out of bounds at row " +
                                std::to_string(i));
        if (i > 0 && !(indices[i - 1] < v))
            throw ArgumentError("sparse tensor indices must be strictly increasing "
                                "(duplicate or unsorted at row " +
                                std::to_string(i) + ")");
    }
}

}  // namespace ssc
