// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#include "ssckit/metrics.hpp"

#include <cstdio>

#include "ssckit/error.hpp"

namespace ssc {

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
    if (other.num_classes != num_classes)
        throw ArgumentError("cannot merge confusion matrices of different sizes");
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
}

void accumulate(const VoxelLabelGrid& pred, const VoxelLabelGrid& gt,
                ConfusionMatrix& cm) {
    if (pred.spec.dims != gt.spec.dims)
        throw ArgumentError("prediction/ground-truth grid dims differ");
    if (pred.spec.num_classes != gt.spec.num_classes ||
        pred.spec.num_classes != cm.num_classes)
        throw ArgumentError("class counts differ between grids and matrix");
    for (std::size_t i = 0; i < gt.labels.size(); ++i) {
        const std::uint16_t g = gt.labels[i];
        if (g == gt.spec.ignore_label) continue;
        const std::uint16_t p = pred.labels[i];
        if (p == pred.spec.ignore_label)
            throw DataError("prediction carries the ignore sentinel at linear index " +
                            std::to_string(i));
        cm.at(g, p) += 1;
    }
}

std::optional<double> class_iou(const ConfusionMatrix& cm, std::uint16_t i) {
    if (i >= cm.num_classes) throw ArgumentError("class id out of range");
    const std::uint64_t tp = cm.at(i, i);
    std::uint64_t fp = 0, fn = 0;
    for (std::uint16_t j = 0; j < cm.num_classes; ++j) {
        if (j == i) continue;
        fp += cm.at(j, i);  // predicted i, truly j
        fn += cm.at(i, j);  // truly i, predicted j
    }
    const std::uint64_t denom = tp + fp + fn;
    if (denom == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(denom);
}

std::vector<std::uint16_t> semantic_class_set(std::uint16_t num_classes,
                                              std::uint16_t empty_label) {
    std::vector<std::uint16_t> set;
    for (std::uint16_t c = 0; c < num_classes; ++c)
        if (c != empty_label) set.push_back(c);
    return set;
}

double miou(const ConfusionMatrix& cm, const std::vector<std::uint16_t>& class_set,
            bool absent_as_zero) {
    if (class_set.empty()) throw ArgumentError("mIoU over an empty class set");
    double sum = 0.0;
    std::size_t counted = 0;
    for (std::uint16_t c : class_set) {
        const std::optional<double> iou = class_iou(cm, c);
        if (iou) {
            sum += *iou;
            ++counted;
        } else if (absent_as_zero) {
            ++counted;
        }
    }
    if (counted == 0)
        throw UndefinedError("mIoU undefined: no class in the set occurs");
    return sum / static_cast<double>(counted);
}

VoxelLabelGrid binarize_occupancy(const VoxelLabelGrid& grid) {
    GridSpec spec = grid.spec;
    spec.num_classes = 2;
    spec.empty_label = 0;
    VoxelLabelGrid out(spec);
    for (std::size_t i = 0; i < grid.labels.size(); ++i) {
        const std::uint16_t l = grid.labels[i];
        if (l == grid.spec.ignore_label)
            out.labels[i] = spec.ignore_label;
        else
            out.labels[i] = l == grid.spec.empty_label ? 0 : 1;
    }
    return out;
}

double completion_iou(const VoxelLabelGrid& pred, const VoxelLabelGrid& gt) {
    if (pred.spec.dims != gt.spec.dims)
        throw ArgumentError("prediction/ground-truth grid dims differ");
    std::uint64_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < gt.labels.size(); ++i) {
        if (gt.labels[i] == gt.spec.ignore_label) continue;
        const bool g = gt.labels[i] != gt.spec.empty_label;
        const bool p = pred.labels[i] != pred.spec.empty_label &&
                       pred.labels[i] != pred.spec.ignore_label;
        inter += g && p;
        uni += g || p;
    }
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::string metrics_report(const ConfusionMatrix& cm,
                           const std::vector<std::string>& class_names,
                           std::uint16_t empty_label, bool absent_as_zero,
                           std::optional<double> completion) {
    if (class_names.size() != cm.num_classes)
        throw ArgumentError("need one class name per class");

    std::string table = "class                 IoU\n";
    std::string kv;
    char line[128];
    for (std::uint16_t c = 0; c < cm.num_classes; ++c) {
        if (c == empty_label) continue;
        const std::optional<double> iou = class_iou(cm, c);
        if (iou) {
            std::snprintf(line, sizeof(line), "%-20s  %.4f\n", class_names[c].c_str(),
                          *iou);
            table += line;
            std::snprintf(line, sizeof(line), "iou.%s=%.17g\n", class_names[c].c_str(),
                          *iou);
            kv += line;
        } else {
            std::snprintf(line, sizeof(line), "%-20s  absent\n",
                          class_names[c].c_str());
            table += line;
            if (absent_as_zero) {
                std::snprintf(line, sizeof(line), "iou.%s=0\n", class_names[c].c_str());
                kv += line;
            }
        }
    }
    const double m = miou(cm, semantic_class_set(cm.num_classes, empty_label),
                          absent_as_zero);
    std::snprintf(line, sizeof(line), "%-20s  %.4f\n", "mIoU", m);
    table += line;
    std::snprintf(line, sizeof(line), "miou=%.17g\n", m);
    kv += line;
    if (completion) {
        std::snprintf(line, sizeof(line), "%-20s  %.4f\n", "completion", *completion);
        table += line;
        std::snprintf(line, sizeof(line), "completion_iou=%.17g\n", *completion);
        kv += line;
    }
    return table + kv;
}

}  // namespace ssc
