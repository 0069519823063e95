// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#include "ssckit/distill.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ssckit/error.hpp"
#include "ssckit/parallel.hpp"
#include "ssckit/rng.hpp"

namespace ssc {

AlignedPair align(const SparseVoxelTensor& student, const SparseVoxelTensor& teacher) {
    student.validate();
    teacher.validate();
    if (student.feature_dim() != teacher.feature_dim() && student.size() > 0 &&
        teacher.size() > 0)
        throw ArgumentError("student/teacher feature dims differ");
    if (student.size() == 0)
        throw AlignmentError("student tensor is empty; nothing to distill");

    // Both index lists are sorted, so a single merge scan finds the
    // intersection in student order.
    std::vector<std::size_t> s_rows, t_rows;
    std::size_t si = 0, ti = 0;
    while (si < student.size() && ti < teacher.size()) {
        if (student.indices[si] < teacher.indices[ti]) {
            ++si;
        } else if (teacher.indices[ti] < student.indices[si]) {
            ++ti;
        } else {
            s_rows.push_back(si);
            t_rows.push_back(ti);
            ++si;
            ++ti;
        }
    }
    if (s_rows.empty())
        throw AlignmentError("student and teacher share no voxel index");

    AlignedPair pair;
    pair.matched_fraction =
        static_cast<double>(s_rows.size()) / static_cast<double>(student.size());
    const Eigen::Index n = static_cast<Eigen::Index>(s_rows.size());
    pair.student.dims = student.dims;
    pair.teacher.dims = teacher.dims;
    pair.student.features.resize(n, student.features.cols());
    pair.teacher.features.resize(n, teacher.features.cols());
    pair.student.indices.reserve(s_rows.size());
    pair.teacher.indices.reserve(s_rows.size());
    for (Eigen::Index r = 0; r < n; ++r) {
        pair.student.indices.push_back(student.indices[s_rows[r]]);
        pair.teacher.indices.push_back(teacher.indices[t_rows[r]]);
        pair.student.features.row(r) = student.features.row(
            static_cast<Eigen::Index>(s_rows[static_cast<std::size_t>(r)]));
        pair.teacher.features.row(r) = teacher.features.row(
            static_cast<Eigen::Index>(t_rows[static_cast<std::size_t>(r)]));
    }
    return pair;
}

namespace {

Eigen::VectorXd row_norms(const Eigen::MatrixXd& f) {
    Eigen::VectorXd norms(f.rows());
    for (Eigen::Index i = 0; i < f.rows(); ++i) norms(i) = f.row(i).norm();
    return norms;
}

}  // namespace

Eigen::MatrixXd pairwise_similarity(const Eigen::MatrixXd& features, int threads) {
    const Eigen::Index n = features.rows();
    if (n < 1) throw ArgumentError("similarity needs at least one feature row");
    const Eigen::VectorXd norms = row_norms(features);
    Eigen::MatrixXd p(n, n);
    parallel_for(static_cast<std::size_t>(n), threads,
                 [&](std::size_t begin, std::size_t end) {
                     for (std::size_t iu = begin; iu < end; ++iu) {
                         const Eigen::Index i = static_cast<Eigen::Index>(iu);
                         p(i, i) = norms(i) > kNormEpsilon ? 1.0 : 0.0;
                         for (Eigen::Index j = i + 1; j < n; ++j) {
                             double v = 0.0;
                             if (norms(i) > kNormEpsilon && norms(j) > kNormEpsilon)
                                 v = features.row(i).dot(features.row(j)) /
                                     (norms(i) * norms(j));
                             p(i, j) = v;
                         }
                     }
                 });
    // Mirror the computed upper triangle for exact symmetry.
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) p(j, i) = p(i, j);
    return p;
}

double dskd_loss(const Eigen::MatrixXd& p_student, const Eigen::MatrixXd& p_teacher) {
    if (p_student.rows() != p_teacher.rows() || p_student.cols() != p_teacher.cols())
        throw ArgumentError("similarity matrices differ in shape");
    if (p_student.rows() != p_student.cols())
        throw ArgumentError("similarity matrix must be square");
    const Eigen::Index n = p_student.rows();
    // Row-by-row accumulation in index order keeps the reduction independent
    // of any upstream parallelism.
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double row = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double d = p_student(i, j) - p_teacher(i, j);
            row += d * d;
        }
        total += row;
    }
    return total / (static_cast<double>(n) * static_cast<double>(n));
}

double dskd_loss_from_features(const Eigen::MatrixXd& f_student,
                               const Eigen::MatrixXd& f_teacher, int threads) {
    if (f_student.rows() != f_teacher.rows())
        throw ArgumentError("aligned features must have equal row counts");
    return dskd_loss(pairwise_similarity(f_student, threads),
                     pairwise_similarity(f_teacher, threads));
}

Eigen::MatrixXd dskd_grad(const Eigen::MatrixXd& f_student,
                          const Eigen::MatrixXd& f_teacher, int threads) {
    if (f_student.rows() != f_teacher.rows())
        throw ArgumentError("aligned features must have equal row counts");
    const Eigen::Index n = f_student.rows();
    const Eigen::MatrixXd ps = pairwise_similarity(f_student, 1);
    const Eigen::MatrixXd pt = pairwise_similarity(f_teacher, 1);
    const Eigen::VectorXd norms = row_norms(f_student);
    const double scale = 4.0 / (static_cast<double>(n) * static_cast<double>(n));

    // d/dF_S(i) of (P_S(i,j) - P_T(i,j))^2, summed over j != i. Each
    // unordered pair {i,j} appears twice in the loss (symmetric matrix) and
    // the square contributes another factor 2, hence the 4/N^2. Diagonal
    // entries are clamped constants (exactly 1 or 0), so they add nothing.
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(n, f_student.cols());
    parallel_for(static_cast<std::size_t>(n), threads,
                 [&](std::size_t begin, std::size_t end) {
                     for (std::size_t iu = begin; iu < end; ++iu) {
                         const Eigen::Index i = static_cast<Eigen::Index>(iu);
                         if (norms(i) <= kNormEpsilon) continue;
                         Eigen::RowVectorXd g =
                             Eigen::RowVectorXd::Zero(f_student.cols());
                         for (Eigen::Index j = 0; j < n; ++j) {
                             if (j == i || norms(j) <= kNormEpsilon) continue;
                             const double resid = ps(i, j) - pt(i, j);
                             if (resid == 0.0) continue;
                             g += (scale * resid) *
                                  (f_student.row(j) / (norms(i) * norms(j)) -
                                   ps(i, j) / (norms(i) * norms(i)) * f_student.row(i));
                         }
                         grad.row(i) = g;
                     }
                 });
    return grad;
}

SparseVoxelTensor subsample_rows(const SparseVoxelTensor& tensor, std::size_t cap,
                                 std::uint64_t seed) {
    tensor.validate();
    if (cap == 0) throw ArgumentError("subsample cap must be >= 1");
    if (tensor.size() <= cap) return tensor;

    // Partial Fisher-Yates over row positions, then re-sort the chosen
    // positions so the sorted-index invariant survives.
    std::vector<std::size_t> order(tensor.size());
    std::iota(order.begin(), order.end(), 0);
    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < cap; ++i) {
        const std::size_t j =
            i + static_cast<std::size_t>(rng.next_below(order.size() - i));
        std::swap(order[i], order[j]);
    }
    order.resize(cap);
    std::sort(order.begin(), order.end());

    SparseVoxelTensor out;
    out.dims = tensor.dims;
    out.indices.reserve(cap);
    out.features.resize(static_cast<Eigen::Index>(cap), tensor.features.cols());
    for (std::size_t r = 0; r < cap; ++r) {
        out.indices.push_back(tensor.indices[order[r]]);
        out.features.row(static_cast<Eigen::Index>(r)) =
            tensor.features.row(static_cast<Eigen::Index>(order[r]));
    }
    return out;
}

}  // namespace ssc
