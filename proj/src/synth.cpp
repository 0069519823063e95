// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#include "ssckit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "ssckit/error.hpp"
#include "ssckit/rng.hpp"
#include "ssckit/voxelize.hpp"

namespace ssc {

namespace {

/// Inclusive voxel index range [lo, hi] covered by the closed interval
/// [a, b] on one axis, clipped to [0, dim). Empty when hi < lo.
void axis_range(double a, double b, double origin, double size, std::int32_t dim,
                std::int32_t& lo, std::int32_t& hi) {
    lo = static_cast<std::int32_t>(std::floor((a - origin) / size));
    hi = static_cast<std::int32_t>(std::floor((b - origin) / size));
    lo = std::max(lo, 0);
    hi = std::min(hi, dim - 1);
}

const Eigen::Vector3d& track_at(const std::vector<Eigen::Vector3d>& track,
                                std::size_t frame) {
    return track.size() == 1 ? track[0] : track[frame];
}

}  // namespace

GeneratedScene generate(const SceneScript& script, const GridSpec& spec) {
    spec.validate();
    if (script.frame_count < 1) throw ArgumentError("frame_count must be >= 1");
    if (script.points_per_voxel < 1)
        throw ArgumentError("points_per_voxel must be >= 1");
    if (!(script.margin > 0.0)) throw ArgumentError("margin must be > 0");
    const Eigen::Vector3d size = spec.voxel_size();
    for (int a = 0; a < 3; ++a) {
        if (size(a) <= 2.0 * script.margin)
            throw ArgumentError("voxel size must exceed twice the sampling margin");
    }
    const std::size_t fc = static_cast<std::size_t>(script.frame_count);
    if (!script.sensor_track.empty() && script.sensor_track.size() != 1 &&
        script.sensor_track.size() != fc)
        throw ArgumentError("sensor track must have 1 or frame_count entries");
    for (const BoxTrack& object : script.objects) {
        for (int a = 0; a < 3; ++a)
            if (object.extent(a) <= 2.0 * script.margin)
                throw ArgumentError("degenerate box: extent must exceed 2*margin");
        if (object.track.empty() ||
            (object.track.size() != 1 && object.track.size() != fc))
            throw ArgumentError("object track must have 1 or frame_count entries");
        if (object.class_id == spec.empty_label || object.class_id >= spec.num_classes)
            throw ArgumentError("object class must be a semantic class of the grid");
    }

    GeneratedScene scene;
    scene.frames.resize(fc);
    scene.sensor_poses.reserve(fc);
    const Eigen::Vector3d sensor0 = script.sensor_track.empty()
                                        ? Eigen::Vector3d::Zero()
                                        : script.sensor_track[0];
    for (std::size_t f = 0; f < fc; ++f) {
        PoseSE3 pose;
        pose.translation = script.sensor_track.empty()
                               ? Eigen::Vector3d::Zero()
                               : track_at(script.sensor_track, f);
        scene.sensor_poses.push_back(pose);
    }

    // Footprints and points live in frame-0 coordinates: world minus the
    // frame-0 sensor position. Sensor motion therefore shifts what later
    // frames *observe* but never the geometry being observed.
    for (std::size_t oi = 0; oi < script.objects.size(); ++oi) {
        const BoxTrack& object = script.objects[oi];
        ObjectFootprints fp;
        fp.class_id = object.class_id;
        fp.instance_id = object.instance_id;
        fp.per_frame.resize(fc);
        SplitMix64 rng(split_seed(script.seed, oi));

        for (std::size_t f = 0; f < fc; ++f) {
            const Eigen::Vector3d center = track_at(object.track, f) - sensor0;
            std::int32_t lo[3], hi[3];
            for (int a = 0; a < 3; ++a) {
                // The closed, margin-shrunk box decides which voxels belong
                // to the object; clipping keeps footprints inside the grid.
                const double box_lo = center(a) - object.extent(a) / 2.0 + script.margin;
                const double box_hi = center(a) + object.extent(a) / 2.0 - script.margin;
                axis_range(box_lo, box_hi, spec.origin(a), size(a), spec.dims[a],
                           lo[a], hi[a]);
            }
            std::vector<VoxelIndex>& voxels = fp.per_frame[f];
            for (std::int32_t x = lo[0]; x <= hi[0]; ++x)
                for (std::int32_t y = lo[1]; y <= hi[1]; ++y)
                    for (std::int32_t z = lo[2]; z <= hi[2]; ++z)
                        voxels.push_back({x, y, z});

            LabeledFrame& frame = scene.frames[f];
            const Eigen::Vector3d sensor_f = scene.sensor_poses[f].translation;
            for (const VoxelIndex& v : voxels) {
                for (std::int32_t s = 0; s < script.points_per_voxel; ++s) {
                    Eigen::Vector3d p;  // frame-0 coordinates, margin-safe
                    const std::int32_t idx[3] = {v.x, v.y, v.z};
                    for (int a = 0; a < 3; ++a) {
                        const double cell_lo = spec.origin(a) + idx[a] * size(a);
                        p(a) = rng.next_in(cell_lo + script.margin,
                                           cell_lo + size(a) - script.margin);
                    }
                    // World point, then into frame f's sensor frame.
                    const Eigen::Vector3d world = p + sensor0;
                    const Eigen::Vector3d local = world - sensor_f;
                    frame.cloud.points.push_back(local.cast<float>());
                    frame.cloud.intensity.push_back(
                        static_cast<float>(rng.next_double()));
                    frame.labels.semantic.push_back(object.class_id);
                    frame.labels.instance.push_back(object.instance_id);
                }
            }
        }
        scene.footprints.push_back(std::move(fp));
    }
    return scene;
}

namespace {

std::vector<double> parse_numbers(const std::string& text, const std::string& where) {
    std::istringstream in(text);
    std::vector<double> out;
    double v = 0;
    while (in >> v) out.push_back(v);
    if (!in.eof()) throw FormatError(where + ": expected numbers, got '" + text + "'");
    return out;
}

Eigen::Vector3d parse_vec3(const std::string& text, const std::string& where) {
    const std::vector<double> vals = parse_numbers(text, where);
    if (vals.size() != 3) throw FormatError(where + ": expected 3 numbers");
    return {vals[0], vals[1], vals[2]};
}

std::vector<Eigen::Vector3d> parse_track(const std::string& text,
                                         const std::string& where) {
    std::vector<Eigen::Vector3d> out;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        const std::size_t end = text.find(';', begin);
        const std::string piece =
            text.substr(begin, end == std::string::npos ? std::string::npos
                                                        : end - begin);
        out.push_back(parse_vec3(piece, where));
        if (end == std::string::npos) break;
        begin = end + 1;
    }
    return out;
}

std::uint16_t parse_u16(const std::string& text, const std::string& where) {
    const std::vector<double> vals = parse_numbers(text, where);
    if (vals.size() != 1 || vals[0] < 0 || vals[0] > 65535 ||
        vals[0] != std::floor(vals[0]))
        throw FormatError(where + ": expected a 16-bit unsigned integer");
    return static_cast<std::uint16_t>(vals[0]);
}

std::string trim(const std::string& s) {
    const std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::uint64_t parse_u64(const std::string& text, const std::string& where) {
    try {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw FormatError(where + ": expected an unsigned integer, got '" + text + "'");
    }
}

}  // namespace

SceneScript parse_scene_script(const std::string& text) {
    SceneScript script;
    std::map<std::size_t, BoxTrack> objects;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "scene script line " + std::to_string(line_no);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw FormatError(where + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "frame_count") {
            script.frame_count = static_cast<std::int32_t>(parse_u16(value, where));
        } else if (key == "points_per_voxel") {
            script.points_per_voxel = static_cast<std::int32_t>(parse_u16(value, where));
        } else if (key == "margin") {
            const auto vals = parse_numbers(value, where);
            if (vals.size() != 1) throw FormatError(where + ": expected one number");
            script.margin = vals[0];
        } else if (key == "seed") {
            script.seed = parse_u64(value, where);
        } else if (key == "sensor") {
            script.sensor_track = parse_track(value, where);
        } else if (key.rfind("object.", 0) == 0) {
            const std::size_t dot = key.find('.', 7);
            if (dot == std::string::npos)
                throw FormatError(where + ": expected object.<index>.<field>");
            const std::size_t index =
                static_cast<std::size_t>(parse_u64(key.substr(7, dot - 7), where));
            const std::string field = key.substr(dot + 1);
            BoxTrack& object = objects[index];
            if (field == "class")
                object.class_id = parse_u16(value, where);
            else if (field == "instance")
                object.instance_id = parse_u16(value, where);
            else if (field == "extent")
                object.extent = parse_vec3(value, where);
            else if (field == "track")
                object.track = parse_track(value, where);
            else
                throw FormatError(where + ": unknown object field '" + field + "'");
        } else {
            throw FormatError(where + ": unknown key '" + key + "'");
        }
    }
    for (std::size_t i = 0; i < objects.size(); ++i) {
        const auto it = objects.find(i);
        if (it == objects.end())
            throw FormatError("scene script: object indices must be 0.." +
                              std::to_string(objects.size() - 1) + " without gaps");
        script.objects.push_back(it->second);
    }
    return script;
}

}  // namespace ssc
