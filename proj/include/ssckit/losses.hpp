// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ssckit/types.hpp"

namespace ssc {

/// Additive floor inside log() so hard-zero probabilities stay finite.
inline constexpr double kLogEpsilon = 1e-12;

/// Coefficients of the total objective:
/// total = ce + alpha * lovasz + beta * dskd.
struct LossWeights {
    double alpha = 1.0;
    double beta = 3000.0;
};

/// Per-voxel class distributions with ground-truth labels. Rows are the M
/// voxels under consideration; columns the C classes. Labels equal to
/// `ignore` are masked out of every loss.
struct ProbVolume {
    Eigen::MatrixXd probs;                // M x C, rows on the simplex
    std::vector<std::uint16_t> labels;    // M entries, < C or == ignore
    std::uint16_t ignore = kIgnoreLabel;

    Eigen::Index voxel_count() const { return probs.rows(); }
    Eigen::Index class_count() const { return probs.cols(); }

    /// Throws ArgumentError unless entries are in [0,1], every row sums to 1
    /// within 1e-6, and labels are in range.
    void validate() const;
};

/// A scalar loss value with its analytic gradient w.r.t. the probabilities.
struct LossResult {
    double value = 0.0;
    Eigen::MatrixXd grad;  // same shape as ProbVolume::probs
};

/// Mean over non-ignored voxels of -log(probs[i, label_i] + kLogEpsilon).
/// Gradient rows of ignored voxels are zero.
///
/// Throws UndefinedError when every voxel is ignored.
LossResult cross_entropy(const ProbVolume& pv);

/// Lovász extension of the Jaccard loss under softmax probabilities. For
/// each class c present among the non-ignored labels: errors = |1{label=c} -
/// probs[:,c]|, sorted descending (stable, ties by voxel index); weights =
/// first difference of the Jaccard curve along that order; loss_c =
/// dot(sorted errors, weights). Returns the mean over present classes. At
/// hard 0/1 predictions this equals the mean of (1 - IoU_c).
///
/// Throws UndefinedError when every voxel is ignored.
LossResult lovasz_softmax(const ProbVolume& pv);

/// ce + alpha * lovasz + beta * dskd.
double total_loss(double ce, double lovasz, double dskd, const LossWeights& w);

}  // namespace ssc
