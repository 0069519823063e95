// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#include "ssckit/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ssckit/error.hpp"
#include "ssckit/voxelize.hpp"

namespace ssc {

DatasetPreset semantickitti_preset() {
    DatasetPreset p;
    p.name = "semantickitti";
    p.num_classes = 20;
    p.class_names = {"empty",        "car",        "bicycle",    "motorcycle",
                     "truck",        "other-vehicle", "person",  "bicyclist",
                     "motorcyclist", "road",       "parking",    "sidewalk",
                     "other-ground", "building",   "fence",      "vegetation",
                     "trunk",        "terrain",    "pole",       "traffic-sign"};
    p.moving_classes = {1, 2, 3, 4, 5, 6, 7, 8};
    return p;
}

DatasetPreset semanticposs_preset() {
    DatasetPreset p;
    p.name = "semanticposs";
    p.num_classes = 12;
    p.class_names = {"empty", "person",       "rider", "car",      "trunk",
                     "plants", "traffic-sign", "pole",  "building", "fence",
                     "bike",   "ground"};
    p.moving_classes = {1, 2, 3};
    return p;
}

namespace {

void apply_preset(RunConfig& config, const DatasetPreset& preset) {
    config.dataset = preset.name;
    config.grid.num_classes = preset.num_classes;
    config.class_names = preset.class_names;
    config.rectify.moving_classes = preset.moving_classes;
}

std::string trim(const std::string& s) {
    const std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<double> numbers(const std::string& text, const std::string& key,
                            std::size_t count) {
    std::istringstream in(text);
    std::vector<double> out;
    double v = 0;
    while (in >> v) out.push_back(v);
    if (!in.eof() || out.size() != count)
        throw ArgumentError("config key '" + key + "' expects " +
                            std::to_string(count) + " numbers, got '" + text + "'");
    return out;
}

double number(const std::string& text, const std::string& key) {
    return numbers(text, key, 1)[0];
}

std::uint16_t u16(const std::string& text, const std::string& key) {
    const double v = number(text, key);
    if (v < 0 || v > 65535 || v != std::floor(v))
        throw ArgumentError("config key '" + key +
                            "' expects a 16-bit unsigned integer");
    return static_cast<std::uint16_t>(v);
}

}  // namespace

RunConfig default_run_config() {
    RunConfig config;
    config.grid = default_grid_spec();
    apply_preset(config, semantickitti_preset());
    if (const char* env = std::getenv("SSC_THREADS")) {
        try {
            std::size_t pos = 0;
            const long n = std::stol(env, &pos);
            if (pos != std::string(env).size() || n < 1)
                throw ArgumentError("");
            config.threads = static_cast<int>(n);
        } catch (const std::exception&) {
            throw ArgumentError("SSC_THREADS must be a positive integer, got '" +
                                std::string(env) + "'");
        }
    }
    return config;
}

void apply_dataset(RunConfig& config, const std::string& name) {
    if (name == "semantickitti")
        apply_preset(config, semantickitti_preset());
    else if (name == "semanticposs")
        apply_preset(config, semanticposs_preset());
    else if (name == "custom") {
        // Custom datasets declare their own alphabet: drop the preset names
        // and moving classes so stale SemanticKITTI entries cannot leak in.
        config.dataset = "custom";
        config.class_names.clear();
        config.rectify.moving_classes.clear();
    } else
        throw ArgumentError("unknown dataset '" + name +
                            "' (expected semantickitti, semanticposs, or custom)");
}

std::vector<std::pair<std::string, std::string>> parse_key_values(
    const std::string& text) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError("config line " + std::to_string(line_no) +
                              ": expected key=value");
        pairs.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return pairs;
}

void apply_config_text(RunConfig& config, const std::string& text) {
    for (const auto& [key, value] : parse_key_values(text)) {
        if (key == "dataset") {
            apply_dataset(config, value);
        } else if (key == "grid.origin") {
            const auto v = numbers(value, key, 3);
            config.grid.origin = Eigen::Vector3d(v[0], v[1], v[2]);
        } else if (key == "grid.extent") {
            const auto v = numbers(value, key, 3);
            config.grid.extent = Eigen::Vector3d(v[0], v[1], v[2]);
        } else if (key == "grid.dims") {
            const auto v = numbers(value, key, 3);
            for (double d : v)
                if (d < 1 || d != std::floor(d))
                    throw ArgumentError("config key 'grid.dims' expects integers >= 1");
            config.grid.dims = {static_cast<std::int32_t>(v[0]),
                                static_cast<std::int32_t>(v[1]),
                                static_cast<std::int32_t>(v[2])};
        } else if (key == "grid.num_classes") {
            config.grid.num_classes = u16(value, key);
        } else if (key == "grid.empty_label") {
            config.grid.empty_label = u16(value, key);
        } else if (key == "grid.ignore_label") {
            config.grid.ignore_label = u16(value, key);
        } else if (key == "class_names") {
            std::istringstream in(value);
            std::string name;
            config.class_names.clear();
            while (in >> name) config.class_names.push_back(name);
        } else if (key == "moving_classes") {
            std::istringstream in(value);
            config.rectify.moving_classes.clear();
            double v = 0;
            while (in >> v) {
                if (v < 0 || v > 65535 || v != std::floor(v))
                    throw ArgumentError("config key 'moving_classes' expects class ids");
                config.rectify.moving_classes.insert(static_cast<std::uint16_t>(v));
            }
            if (!in.eof())
                throw ArgumentError("config key 'moving_classes' expects class ids");
        } else if (key == "unlabeled_class") {
            config.rectify.unlabeled_class = u16(value, key);
        } else if (key == "alpha") {
            config.weights.alpha = number(value, key);
        } else if (key == "beta") {
            config.weights.beta = number(value, key);
        } else if (key == "seed") {
            const double v = number(value, key);
            if (v < 0 || v != std::floor(v))
                throw ArgumentError("config key 'seed' expects a nonnegative integer");
            config.seed = static_cast<std::uint64_t>(v);
        } else if (key == "threads") {
            const double v = number(value, key);
            if (v < 1 || v != std::floor(v))
                throw ArgumentError("config key 'threads' expects an integer >= 1");
            config.threads = static_cast<int>(v);
        } else if (key == "epsilon") {
            config.epsilon = number(value, key);
            if (config.epsilon < 0)
                throw ArgumentError("config key 'epsilon' must be >= 0");
        } else if (key == "absent_as_zero") {
            if (value == "true" || value == "1")
                config.absent_as_zero = true;
            else if (value == "false" || value == "0")
                config.absent_as_zero = false;
            else
                throw ArgumentError("config key 'absent_as_zero' expects true/false");
        } else {
            throw ArgumentError("unknown config key '" + key + "'");
        }
    }
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    RunConfig config = default_run_config();
    apply_config_text(config, buffer.str());
    return config;
}

void finalize_run_config(RunConfig& config) {
    config.grid.validate();
    if (config.class_names.empty()) {
        for (std::uint16_t c = 0; c < config.grid.num_classes; ++c)
            config.class_names.push_back("class_" + std::to_string(c));
    }
    if (config.class_names.size() != config.grid.num_classes)
        throw ArgumentError("class_names must have one entry per class (" +
                            std::to_string(config.grid.num_classes) + "), got " +
                            std::to_string(config.class_names.size()));
    for (std::uint16_t cls : config.rectify.moving_classes) {
        if (cls == config.grid.empty_label || cls >= config.grid.num_classes)
            throw ArgumentError("moving class " + std::to_string(cls) +
                                " is not a semantic class of the grid");
    }
    if (config.rectify.unlabeled_class < config.grid.num_classes)
        throw ArgumentError("unlabeled_class must lie outside the class id range");
    if (config.threads < 1) throw ArgumentError("threads must be >= 1");
    if (config.epsilon < 0) throw ArgumentError("epsilon must be >= 0");
}

}  // namespace ssc
