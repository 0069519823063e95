// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "ssckit/grid.hpp"

namespace ssc {

/// Rows with L2 norm at or below this are treated as empty: their cosine
/// similarities are defined as 0 and their gradients as 0.
inline constexpr double kNormEpsilon = 1e-12;

/// Student/teacher sparse features restricted to a common, identically
/// ordered index set. matched_fraction reports how much of the student
/// survived the restriction.
struct AlignedPair {
    SparseVoxelTensor student;
    SparseVoxelTensor teacher;
    double matched_fraction = 0.0;
};

/// Restricts both tensors to the indices they share, in sorted order: the
/// teacher's rows are selected at the student's indices; student rows whose
/// index the teacher lacks are dropped (and reflected in matched_fraction =
/// matched / N_s). The expected regime is student indices ⊆ teacher indices
/// (single-frame occupancy inside multi-frame occupancy), where
/// matched_fraction is 1.
///
/// Throws AlignmentError when nothing matches (or the student is empty) —
/// there is nothing to distill.
AlignedPair align(const SparseVoxelTensor& student, const SparseVoxelTensor& teacher);

/// Pairwise cosine similarity: P(i,j) = <F(i),F(j)> / (|F(i)| |F(j)|), with
/// entries involving a row of norm <= kNormEpsilon defined as 0. The
/// diagonal is set to exactly 1 for nonzero-norm rows (0 otherwise) and the
/// matrix is exactly symmetric (the upper triangle is computed and
/// mirrored). `threads` parallelizes over rows; entries are independent, so
/// the result is identical for any thread count.
Eigen::MatrixXd pairwise_similarity(const Eigen::MatrixXd& features, int threads = 1);

/// Mean squared difference over all N^2 entries:
/// (1/N^2) * sum_ij (P_S(i,j) - P_T(i,j))^2, accumulated in fixed row order.
///
/// Throws ArgumentError when the matrices differ in shape.
double dskd_loss(const Eigen::MatrixXd& p_student, const Eigen::MatrixXd& p_teacher);

/// Distillation loss directly from aligned feature rows.
double dskd_loss_from_features(const Eigen::MatrixXd& f_student,
                               const Eigen::MatrixXd& f_teacher, int threads = 1);

/// Analytic gradient of dskd_loss_from_features with respect to the student
/// rows; the teacher is a constant. Rows with norm <= kNormEpsilon get a
/// zero gradient (their similarities are clamped constants).
Eigen::MatrixXd dskd_grad(const Eigen::MatrixXd& f_student,
                          const Eigen::MatrixXd& f_teacher, int threads = 1);

/// Seeded uniform row subsample (without replacement) keeping index order,
/// for bounding the N^2 similarity matrix on large scenes. cap >= current
/// size returns the tensor unchanged.
SparseVoxelTensor subsample_rows(const SparseVoxelTensor& tensor, std::size_t cap,
                                 std::uint64_t seed);

}  // namespace ssc
