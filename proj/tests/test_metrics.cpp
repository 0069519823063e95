// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <string>

#include "oracles.hpp"
#include "ssckit/error.hpp"
#include "ssckit/metrics.hpp"

using namespace ssc;
using namespace ssc::test;

namespace {

VoxelLabelGrid grid_of(const GridSpec& spec, const std::vector<std::uint16_t>& labels) {
    VoxelLabelGrid grid(spec);
    REQUIRE(labels.size() == grid.labels.size());
    grid.labels = labels;
    return grid;
}

}  // namespace

TEST_CASE("accumulate counts (gt, pred) pairs and skips ignored ground truth") {
    const GridSpec spec = make_spec({2, 2, 1}, 0.5, 3);
    const VoxelLabelGrid gt = grid_of(spec, {1, 2, kIgnoreLabel, 0});
    const VoxelLabelGrid pred = grid_of(spec, {1, 1, 2, 0});

    ConfusionMatrix cm(3);
    accumulate(pred, gt, cm);
    CHECK(cm.at(1, 1) == 1);
    CHECK(cm.at(2, 1) == 1);
    CHECK(cm.at(0, 0) == 1);
    CHECK(cm.total() == 3);  // the ignored voxel contributes nothing
}

TEST_CASE("accumulate validates shapes and prediction labels") {
    const GridSpec spec = make_spec({2, 2, 1}, 0.5, 3);
    const VoxelLabelGrid gt = grid_of(spec, {1, 2, 0, 0});

    SUBCASE("prediction may not be ignore at an evaluated voxel") {
        const VoxelLabelGrid pred = grid_of(spec, {1, kIgnoreLabel, 0, 0});
        ConfusionMatrix cm(3);
        CHECK_THROWS_AS(accumulate(pred, gt, cm), DataError);
    }
    SUBCASE("dims must match") {
        const GridSpec other = make_spec({2, 1, 2}, 0.5, 3);
        const VoxelLabelGrid pred(other);
        ConfusionMatrix cm(3);
        CHECK_THROWS_AS(accumulate(pred, gt, cm), ArgumentError);
    }
    SUBCASE("matrix class count must match the grids") {
        const VoxelLabelGrid pred = grid_of(spec, {1, 2, 0, 0});
        ConfusionMatrix cm(4);
        CHECK_THROWS_AS(accumulate(pred, gt, cm), ArgumentError);
    }
}

TEST_CASE("confusion matrices merge additively and exactly") {
    const GridSpec spec = make_spec({6, 5, 4}, 0.4, 7);
    SplitMix64 rng(811);
    for (int trial = 0; trial < 10; ++trial) {
        const VoxelLabelGrid gt1 = random_grid(spec, 0.5, rng);
        const VoxelLabelGrid pred1 = random_grid(spec, 0.5, rng);
        const VoxelLabelGrid gt2 = random_grid(spec, 0.3, rng);
        const VoxelLabelGrid pred2 = random_grid(spec, 0.7, rng);

        ConfusionMatrix whole(7), part1(7), part2(7);
        accumulate(pred1, gt1, whole);
        accumulate(pred2, gt2, whole);
        accumulate(pred1, gt1, part1);
        accumulate(pred2, gt2, part2);
        part1.merge(part2);
        CHECK(part1.counts == whole.counts);
    }
}

TEST_CASE("class IoU: fixture values and the absent case") {
    ConfusionMatrix cm(3);
    cm.at(1, 1) = 6;
    cm.at(1, 2) = 2;  // false negatives for class 1
    cm.at(2, 1) = 2;  // false positives for class 1
    cm.at(0, 0) = 5;

    const auto iou1 = class_iou(cm, 1);
    REQUIRE(iou1.has_value());
    CHECK(*iou1 == doctest::Approx(6.0 / 10.0).epsilon(1e-12));

    SUBCASE("class absent from gt and pred has no defined IoU") {
        ConfusionMatrix empty(3);
        empty.at(0, 0) = 4;
        CHECK_FALSE(class_iou(empty, 1).has_value());
    }
    SUBCASE("zero intersection with nonzero union is 0") {
        ConfusionMatrix zero(3);
        zero.at(1, 2) = 3;
        const auto iou = class_iou(zero, 1);
        REQUIRE(iou.has_value());
        CHECK(*iou == 0.0);
    }
}

TEST_CASE("semantic class set excludes the empty label") {
    const auto set = semantic_class_set(4, 0);
    CHECK(set == std::vector<std::uint16_t>{1, 2, 3});
    const auto set2 = semantic_class_set(4, 2);
    CHECK(set2 == std::vector<std::uint16_t>{0, 1, 3});
}

TEST_CASE("mean IoU: three-voxel fixture scores one half") {
    const GridSpec spec = make_spec({3, 1, 1}, 0.5, 3);
    const VoxelLabelGrid gt = grid_of(spec, {1, 1, 2});
    const VoxelLabelGrid pred = grid_of(spec, {1, 2, 2});
    ConfusionMatrix cm(3);
    accumulate(pred, gt, cm);
    CHECK(miou(cm, semantic_class_set(3, 0)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("mean IoU handles absent classes per the absent_as_zero switch") {
    ConfusionMatrix cm(4);
    cm.at(1, 1) = 3;  // class 1 perfect; classes 2 and 3 absent
    const auto classes = semantic_class_set(4, 0);
    CHECK(miou(cm, classes, false) == doctest::Approx(1.0));
    CHECK(miou(cm, classes, true) == doctest::Approx(1.0 / 3.0));

    SUBCASE("undefined when nothing in the set occurs") {
        ConfusionMatrix none(4);
        none.at(0, 0) = 7;
        CHECK_THROWS_AS(miou(none, classes, false), UndefinedError);
    }
}

TEST_CASE("binarize keeps ignore and maps occupancy to {0,1}") {
    const GridSpec spec = make_spec({2, 2, 1}, 0.5, 5);
    const VoxelLabelGrid grid = grid_of(spec, {0, 3, kIgnoreLabel, 1});
    const VoxelLabelGrid bin = binarize_occupancy(grid);
    CHECK(bin.spec.num_classes == 2);
    CHECK(bin.labels == std::vector<std::uint16_t>{0, 1, kIgnoreLabel, 1});
}

TEST_CASE("completion IoU equals the binary occupancy class-1 IoU") {
    const GridSpec spec = make_spec({5, 4, 3}, 0.4, 6);
    SplitMix64 rng(821);
    for (int trial = 0; trial < 25; ++trial) {
        const VoxelLabelGrid gt = random_grid(spec, 0.4, rng);
        const VoxelLabelGrid pred = random_grid(spec, 0.4, rng);

        ConfusionMatrix bin(2);
        accumulate(binarize_occupancy(pred), binarize_occupancy(gt), bin);
        const auto direct = class_iou(bin, 1);
        const double want = direct ? *direct : 1.0;
        CHECK(completion_iou(pred, gt) == want);
    }
}

TEST_CASE("completion IoU of two empty grids is one") {
    const GridSpec spec = make_spec({3, 3, 2}, 0.5, 4);
    const VoxelLabelGrid empty1(spec), empty2(spec);
    CHECK(completion_iou(empty1, empty2) == 1.0);
}

TEST_CASE("metrics report formats a table plus a parseable key=value block") {
    ConfusionMatrix cm(3);
    cm.at(1, 1) = 3;
    cm.at(2, 1) = 1;
    cm.at(2, 2) = 1;
    const std::vector<std::string> names{"empty", "thing", "stuff"};
    const std::string report = metrics_report(cm, names, 0, false, 0.75);

    CHECK(report.find("iou.thing=") != std::string::npos);
    CHECK(report.find("iou.stuff=") != std::string::npos);
    CHECK(report.find("miou=") != std::string::npos);
    CHECK(report.find("completion_iou=0.75") != std::string::npos);
    CHECK(report.find("thing") != std::string::npos);

    SUBCASE("absent classes are marked") {
        ConfusionMatrix sparse(3);
        sparse.at(1, 1) = 2;
        const std::string r2 = metrics_report(sparse, names, 0, false, std::nullopt);
        CHECK(r2.find("absent") != std::string::npos);
        CHECK(r2.find("completion_iou=") == std::string::npos);
    }
}
