// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#include "ssckit/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ssckit/error.hpp"

namespace ssc {

void ProbVolume::validate() const {
    if (static_cast<Eigen::Index>(labels.size()) != probs.rows())
        throw ArgumentError("label count does not match probability rows");
    if (probs.cols() < 2) throw ArgumentError("need at least 2 classes");
    for (Eigen::Index i = 0; i < probs.rows(); ++i) {
        double sum = 0.0;
        for (Eigen::Index c = 0; c < probs.cols(); ++c) {
            const double p = probs(i, c);
            if (!(p >= 0.0 && p <= 1.0))
                throw ArgumentError("probability out of [0,1] at voxel " +
                                    std::to_string(i));
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-6)
            throw ArgumentError("probability row " + std::to_string(i) +
                                " sums to " + std::to_string(sum));
        if (labels[static_cast<std::size_t>(i)] >= probs.cols() &&
            labels[static_cast<std::size_t>(i)] != ignore)
            throw ArgumentError("label out of range at voxel " + std::to_string(i));
    }
}

namespace {

std::vector<Eigen::Index> active_voxels(const ProbVolume& pv) {
    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < pv.voxel_count(); ++i)
        if (pv.labels[static_cast<std::size_t>(i)] != pv.ignore) active.push_back(i);
    if (active.empty())
        throw UndefinedError("loss undefined: every voxel carries the ignore label");
    return active;
}

}  // namespace

LossResult cross_entropy(const ProbVolume& pv) {
    pv.validate();
    const std::vector<Eigen::Index> active = active_voxels(pv);

    LossResult result;
    result.grad = Eigen::MatrixXd::Zero(pv.probs.rows(), pv.probs.cols());
    const double inv_m = 1.0 / static_cast<double>(active.size());
    double total = 0.0;
    for (Eigen::Index i : active) {
        const Eigen::Index c = pv.labels[static_cast<std::size_t>(i)];
        const double p = pv.probs(i, c) + kLogEpsilon;
        total += -std::log(p);
        result.grad(i, c) = -inv_m / p;
    }
    result.value = total * inv_m;
    return result;
}

LossResult lovasz_softmax(const ProbVolume& pv) {
    pv.validate();
    const std::vector<Eigen::Index> active = active_voxels(pv);
    const Eigen::Index num_classes = pv.class_count();

    // Classes that actually appear in the non-ignored ground truth.
    std::vector<Eigen::Index> present;
    {
        std::vector<bool> seen(static_cast<std::size_t>(num_classes), false);
        for (Eigen::Index i : active) seen[pv.labels[static_cast<std::size_t>(i)]] = true;
        for (Eigen::Index c = 0; c < num_classes; ++c)
            if (seen[static_cast<std::size_t>(c)]) present.push_back(c);
    }

    LossResult result;
    result.grad = Eigen::MatrixXd::Zero(pv.probs.rows(), pv.probs.cols());
    const std::size_t m = active.size();
    std::vector<double> errors(m);
    std::vector<std::uint8_t> fg(m);
    std::vector<std::size_t> order(m);

    double total = 0.0;
    for (Eigen::Index c : present) {
        std::size_t fg_total = 0;
        for (std::size_t a = 0; a < m; ++a) {
            fg[a] = pv.labels[static_cast<std::size_t>(active[a])] ==
                    static_cast<std::uint16_t>(c);
            fg_total += fg[a];
            errors[a] = std::abs(static_cast<double>(fg[a]) - pv.probs(active[a], c));
        }

        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return errors[a] > errors[b];  // descending; stability keeps index ties
        });

        // Jaccard curve along the sorted order, first-differenced into the
        // weight of each position. With the errors sorted descending this is
        // the Lovász extension of 1 - IoU_c; its value at 0/1-corner inputs
        // is exactly the discrete Jaccard loss.
        std::size_t inter = fg_total;
        std::size_t uni = fg_total;
        double prev_jaccard = 0.0;
        double loss_c = 0.0;
        for (std::size_t pos = 0; pos < m; ++pos) {
            const std::size_t a = order[pos];
            if (fg[a])
                --inter;
            else
                ++uni;
            const double jaccard =
                uni == 0 ? 0.0
                         : 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
            const double weight = jaccard - prev_jaccard;
            prev_jaccard = jaccard;
            loss_c += errors[a] * weight;
            // errors[a] = |fg - p| with p in [0,1]: slope -1 on foreground
            // voxels, +1 on background.
            result.grad(active[a], c) += weight * (fg[a] ? -1.0 : 1.0);
        }
        total += loss_c;
    }

    const double inv_classes = 1.0 / static_cast<double>(present.size());
    result.value = total * inv_classes;
    result.grad *= inv_classes;
    return result;
}

double total_loss(double ce, double lovasz, double dskd, const LossWeights& w) {
    if (!std::isfinite(ce) || !std::isfinite(lovasz) || !std::isfinite(dskd))
        throw ArgumentError("loss terms must be finite");
    if (!(w.alpha >= 0.0) || !(w.beta >= 0.0) || !std::isfinite(w.alpha) ||
        !std::isfinite(w.beta))
        throw ArgumentError("loss weights must be finite and >= 0");
    return ce + w.alpha * lovasz + w.beta * dskd;
}

}  // namespace ssc
