// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ssckit/grid.hpp"
#include "ssckit/labels.hpp"
#include "ssckit/losses.hpp"

namespace ssc {

/// Built-in dataset conventions: class count, class names in the standard
/// reporting order (index = class id, 0 = empty), and the default set of
/// movable classes for rectification.
struct DatasetPreset {
    std::string name;
    std::uint16_t num_classes = 2;
    std::vector<std::string> class_names;
    std::set<std::uint16_t> moving_classes;
};

/// 19 semantic classes + empty; movable: car, bicycle, motorcycle, truck,
/// other-vehicle, person, bicyclist, motorcyclist (ids 1-8).
DatasetPreset semantickitti_preset();

/// 11 semantic classes + empty; movable: person, rider, car (ids 1-3).
DatasetPreset semanticposs_preset();

/// Everything a command needs: grid geometry, rectification setup, loss
/// weights, determinism knobs.
struct RunConfig {
    GridSpec grid;
    RectifyConfig rectify;
    LossWeights weights;
    std::uint64_t seed = 42;
    int threads = 1;
    double epsilon = 0.0;           // sparsify threshold
    bool absent_as_zero = false;    // mIoU treatment of absent classes
    std::string dataset = "semantickitti";
    std::vector<std::string> class_names;  // one per class id
};

/// Defaults: the standard grid, the semantickitti preset, threads from
/// SSC_THREADS when that env var holds a positive integer (else 1).
RunConfig default_run_config();

/// Applies a preset by name ("semantickitti", "semanticposs", or "custom"
/// which changes nothing). Throws ArgumentError on other names.
void apply_dataset(RunConfig& config, const std::string& name);

/// Splits flat "key=value" text into pairs in file order; '#' starts a
/// comment, blank lines are skipped. Throws FormatError on a line without
/// '='.
std::vector<std::pair<std::string, std::string>> parse_key_values(
    const std::string& text);

/// Applies config text onto `config`, in key order. Recognized keys:
/// dataset, grid.origin, grid.extent, grid.dims, grid.num_classes,
/// grid.empty_label, grid.ignore_label, class_names, moving_classes,
/// unlabeled_class, alpha, beta, seed, threads, epsilon, absent_as_zero.
/// A dataset key applies its preset immediately, so later keys can still
/// override parts of it. Throws ArgumentError on unknown keys or bad values.
void apply_config_text(RunConfig& config, const std::string& text);

/// default_run_config() + apply_config_text over the file's contents.
RunConfig load_run_config(const std::string& path);

/// Fills an empty class-name table with generated names ("class_<id>"),
/// then fails (ArgumentError) unless grid, class-name table, and rectify
/// setup are mutually consistent.
void finalize_run_config(RunConfig& config);

}  // namespace ssc
