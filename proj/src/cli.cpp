// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#include "ssckit/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ssckit/config.hpp"
#include "ssckit/distill.hpp"
#include "ssckit/error.hpp"
#include "ssckit/io.hpp"
#include "ssckit/labels.hpp"
#include "ssckit/losses.hpp"
#include "ssckit/metrics.hpp"
#include "ssckit/net.hpp"
#include "ssckit/parallel.hpp"
#include "ssckit/rng.hpp"
#include "ssckit/synth.hpp"
#include "ssckit/voxelize.hpp"

namespace fs = std::filesystem;

namespace ssc::cli {

namespace {

std::string frame_file(const std::string& dir, std::size_t frame,
                       const char* extension) {
    char name[32];
    std::snprintf(name, sizeof(name), "%06zu%s", frame, extension);
    return (fs::path(dir) / name).string();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------- aggregate

struct AggregateArgs {
    std::string scans, labels, poses, out;
    std::size_t start = 0;
    std::size_t count = 0;
};

int cmd_aggregate(const RunConfig& cfg, const AggregateArgs& args,
                  std::ostream& out) {
    const std::vector<PoseSE3> all_poses = read_poses(args.poses);
    if (all_poses.size() < args.start + args.count)
        throw ArgumentError(args.poses + " holds " + std::to_string(all_poses.size()) +
                            " poses but the range needs " +
                            std::to_string(args.start + args.count));
    std::vector<PoseSE3> window(all_poses.begin() + static_cast<std::ptrdiff_t>(args.start),
                                all_poses.begin() +
                                    static_cast<std::ptrdiff_t>(args.start + args.count));

    std::vector<LabeledFrame> frames(args.count);
    for (std::size_t k = 0; k < args.count; ++k) {
        frames[k].cloud = read_point_cloud(frame_file(args.scans, args.start + k, ".bin"));
        frames[k].labels = read_labels(frame_file(args.labels, args.start + k, ".label"));
    }

    const VoxelLabelGrid grid = aggregate_completion_labels(
        frames, transforms_to_first(window), cfg.grid, cfg.threads);
    write_voxel_grid(grid, args.out);
    out << "occupied_voxels=" << grid.occupied_count() << "\n";
    return 0;
}

// ------------------------------------------------------------------ rectify

struct RectifyArgs {
    std::string grid, scan, label, out;
};

int cmd_rectify(const RunConfig& cfg, const RectifyArgs& args, std::ostream& out) {
    VoxelLabelGrid grid = read_voxel_grid(args.grid, cfg.grid);
    LabeledFrame frame;
    frame.cloud = read_point_cloud(args.scan);
    frame.labels = read_labels(args.label);
    const RectifyStats stats = rectify(grid, frame, cfg.rectify, cfg.threads);
    write_voxel_grid(grid, args.out);
    for (const auto& [cls, count] : stats.removed_per_class)
        out << "removed." << cls << "=" << count << "\n";
    out << "removed_total=" << stats.total_removed() << "\n";
    return 0;
}

// --------------------------------------------------------------------- eval

struct EvalArgs {
    std::string pred, gt;
};

int cmd_eval(const RunConfig& cfg, const EvalArgs& args, std::ostream& out) {
    if (!fs::is_directory(args.gt)) throw IoError("not a directory: " + args.gt);
    if (!fs::is_directory(args.pred)) throw IoError("not a directory: " + args.pred);
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(args.gt))
        if (entry.is_regular_file()) names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());
    std::vector<std::string> paired;
    for (const std::string& name : names)
        if (fs::is_regular_file(fs::path(args.pred) / name)) paired.push_back(name);
    if (paired.empty())
        throw ArgumentError("no matching file pairs between " + args.pred + " and " +
                            args.gt);

    // Per-pair matrices merged in name order: additivity of the confusion
    // matrix makes the reduction exact for any thread count.
    std::vector<ConfusionMatrix> semantic(paired.size());
    std::vector<ConfusionMatrix> binary(paired.size());
    std::vector<std::string> failures(paired.size());
    parallel_for(paired.size(), cfg.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            try {
                const VoxelLabelGrid gt =
                    read_voxel_grid((fs::path(args.gt) / paired[i]).string(), cfg.grid);
                const VoxelLabelGrid pred = read_voxel_grid(
                    (fs::path(args.pred) / paired[i]).string(), cfg.grid);
                semantic[i] = ConfusionMatrix(cfg.grid.num_classes);
                accumulate(pred, gt, semantic[i]);
                binary[i] = ConfusionMatrix(2);
                accumulate(binarize_occupancy(pred), binarize_occupancy(gt), binary[i]);
            } catch (const Error& e) {
                failures[i] = e.what();
            }
        }
    });
    for (const std::string& failure : failures)
        if (!failure.empty()) throw DataError(failure);

    ConfusionMatrix cm(cfg.grid.num_classes);
    ConfusionMatrix bin(2);
    for (std::size_t i = 0; i < paired.size(); ++i) {
        cm.merge(semantic[i]);
        bin.merge(binary[i]);
    }
    const std::optional<double> occupied = class_iou(bin, 1);
    const double completion = occupied ? *occupied : 1.0;
    out << "pairs=" << paired.size() << "\n";
    out << metrics_report(cm, cfg.class_names, cfg.grid.empty_label,
                          cfg.absent_as_zero, completion);
    return 0;
}

// --------------------------------------------------------------------- dskd

struct DskdArgs {
    std::string student, teacher;
    std::size_t cap = 0;  // 0 = no cap
};

int cmd_dskd(const RunConfig& cfg, const DskdArgs& args, std::ostream& out) {
    const SparseVoxelTensor student = read_sparse_tensor(args.student);
    const SparseVoxelTensor teacher = read_sparse_tensor(args.teacher);
    AlignedPair pair = align(student, teacher);

    if (args.cap > 0) {
        // Row selection depends only on (size, seed), and both sides of the
        // aligned pair have the same size, so two calls subsample jointly.
        pair.student = subsample_rows(pair.student, args.cap, cfg.seed);
        pair.teacher = subsample_rows(pair.teacher, args.cap, cfg.seed);
    }

    const double loss =
        dskd_loss_from_features(pair.student.features, pair.teacher.features,
                                cfg.threads);
    out << "n_s=" << student.size() << "\n";
    out << "matched=" << pair.student.size() << "\n";
    out << "matched_fraction=" << fmt(pair.matched_fraction) << "\n";
    out << "loss=" << fmt(loss) << "\n";
    return 0;
}

// ---------------------------------------------------------------- gradcheck

struct GradcheckArgs {
    std::size_t instances = 100;
    bool flip_sign = false;
};

double rel_error(double analytic, double reference) {
    const double num = std::abs(analytic - reference);
    const double den = std::max({1e-6, std::abs(analytic), std::abs(reference)});
    return num / den;
}

/// Student/teacher rows away from the zero-norm clamp.
Eigen::MatrixXd random_features(Eigen::Index n, Eigen::Index cf, SplitMix64& rng) {
    Eigen::MatrixXd f(n, cf);
    for (Eigen::Index i = 0; i < n; ++i) {
        do {
            for (Eigen::Index c = 0; c < cf; ++c) f(i, c) = rng.next_in(-1.0, 1.0);
        } while (f.row(i).norm() < 0.3);
    }
    return f;
}

double dskd_suite(std::uint64_t seed, std::size_t instances, bool flip_sign,
                  std::size_t& checked) {
    constexpr double h = 1e-5;
    double worst = 0.0;
    checked = 0;
    for (std::size_t inst = 0; inst < instances; ++inst) {
        SplitMix64 rng(split_seed(seed, 1000 + inst));
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.next_below(15));
        const Eigen::Index cf = 2 + static_cast<Eigen::Index>(rng.next_below(7));
        Eigen::MatrixXd fs = random_features(n, cf, rng);
        const Eigen::MatrixXd ft = random_features(n, cf, rng);

        Eigen::MatrixXd grad = dskd_grad(fs, ft);
        if (flip_sign) grad = -grad;
        double num = 0.0, den_a = 0.0, den_f = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index c = 0; c < cf; ++c) {
                const double keep = fs(i, c);
                fs(i, c) = keep + h;
                const double up = dskd_loss_from_features(fs, ft);
                fs(i, c) = keep - h;
                const double down = dskd_loss_from_features(fs, ft);
                fs(i, c) = keep;
                const double fd = (up - down) / (2.0 * h);
                num = std::max(num, std::abs(grad(i, c) - fd));
                den_a = std::max(den_a, std::abs(grad(i, c)));
                den_f = std::max(den_f, std::abs(fd));
            }
        }
        worst = std::max(worst, num / std::max({1e-6, den_a, den_f}));
        ++checked;
    }
    return worst;
}

struct LossSuiteResult {
    double worst_ce = 0.0;
    double worst_lovasz = 0.0;
    std::size_t directions = 0;
};

LossSuiteResult loss_suite(std::uint64_t seed, std::size_t instances,
                           bool flip_sign) {
    constexpr double h = 1e-5;
    LossSuiteResult result;
    for (std::size_t inst = 0; inst < instances; ++inst) {
        SplitMix64 rng(split_seed(seed, 2000 + inst));
        const Eigen::Index m = 2 + static_cast<Eigen::Index>(rng.next_below(31));
        const Eigen::Index classes = 2 + static_cast<Eigen::Index>(rng.next_below(5));
        ProbVolume pv;
        pv.probs.resize(m, classes);
        for (Eigen::Index i = 0; i < m; ++i) {
            double sum = 0.0;
            for (Eigen::Index c = 0; c < classes; ++c) {
                pv.probs(i, c) = 0.05 + 0.95 * rng.next_double();
                sum += pv.probs(i, c);
            }
            pv.probs.row(i) /= sum;
        }
        pv.labels.resize(static_cast<std::size_t>(m));
        bool any_active = false;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (rng.next_double() < 0.15) {
                pv.labels[static_cast<std::size_t>(i)] = pv.ignore;
            } else {
                pv.labels[static_cast<std::size_t>(i)] =
                    static_cast<std::uint16_t>(rng.next_below(
                        static_cast<std::uint64_t>(classes)));
                any_active = true;
            }
        }
        if (!any_active)
            pv.labels[0] = static_cast<std::uint16_t>(
                rng.next_below(static_cast<std::uint64_t>(classes)));

        LossResult ce = cross_entropy(pv);
        LossResult lv = lovasz_softmax(pv);
        if (flip_sign) {
            ce.grad = -ce.grad;
            lv.grad = -lv.grad;
        }

        std::vector<Eigen::Index> active;
        for (Eigen::Index i = 0; i < m; ++i)
            if (pv.labels[static_cast<std::size_t>(i)] != pv.ignore) active.push_back(i);

        // Directional checks along simplex tangents e_a - e_b, with a = the
        // voxel's own label so the cross-entropy derivative is never zero.
        // Directions that would reorder the Lovász error sort within the
        // step width are skipped: the loss is piecewise linear there.
        for (int want = 0; want < 6; ++want) {
            Eigen::Index voxel = 0, a = 0, b = 0;
            bool found = false;
            for (int attempt = 0; attempt < 30 && !found; ++attempt) {
                voxel = active[rng.next_below(active.size())];
                a = pv.labels[static_cast<std::size_t>(voxel)];
                b = static_cast<Eigen::Index>(
                    rng.next_below(static_cast<std::uint64_t>(classes)));
                if (a == b) continue;
                found = true;
                for (Eigen::Index column : {a, b}) {
                    double err_i = 0.0;
                    std::vector<double> errs;
                    for (Eigen::Index j : active) {
                        const double fg =
                            pv.labels[static_cast<std::size_t>(j)] == column ? 1.0 : 0.0;
                        const double e = std::abs(fg - pv.probs(j, column));
                        if (j == voxel)
                            err_i = e;
                        else
                            errs.push_back(e);
                    }
                    for (double e : errs)
                        if (std::abs(e - err_i) < 50 * h) found = false;
                }
            }
            if (!found) continue;

            const double ana_ce = ce.grad(voxel, a) - ce.grad(voxel, b);
            const double ana_lv = lv.grad(voxel, a) - lv.grad(voxel, b);
            ProbVolume shifted = pv;
            shifted.probs(voxel, a) += h;
            shifted.probs(voxel, b) -= h;
            const double ce_up = cross_entropy(shifted).value;
            const double lv_up = lovasz_softmax(shifted).value;
            shifted.probs(voxel, a) -= 2 * h;
            shifted.probs(voxel, b) += 2 * h;
            const double ce_down = cross_entropy(shifted).value;
            const double lv_down = lovasz_softmax(shifted).value;
            const double fd_ce = (ce_up - ce_down) / (2.0 * h);
            const double fd_lv = (lv_up - lv_down) / (2.0 * h);
            result.worst_ce = std::max(result.worst_ce, rel_error(ana_ce, fd_ce));
            result.worst_lovasz =
                std::max(result.worst_lovasz, rel_error(ana_lv, fd_lv));
            ++result.directions;
        }
    }
    return result;
}

int cmd_gradcheck(const RunConfig& cfg, const GradcheckArgs& args, std::ostream& out) {
    constexpr double tol = 1e-4;
    std::size_t dskd_checked = 0;
    const double worst_dskd =
        dskd_suite(cfg.seed, args.instances, args.flip_sign, dskd_checked);
    const LossSuiteResult losses = loss_suite(cfg.seed, args.instances, args.flip_sign);

    out << "dskd_instances=" << dskd_checked << "\n";
    out << "dskd_worst_rel=" << fmt(worst_dskd) << "\n";
    out << "loss_directions=" << losses.directions << "\n";
    out << "ce_worst_rel=" << fmt(losses.worst_ce) << "\n";
    out << "lovasz_worst_rel=" << fmt(losses.worst_lovasz) << "\n";
    const bool pass = worst_dskd <= tol && losses.worst_ce <= tol &&
                      losses.worst_lovasz <= tol && losses.directions > 0;
    out << "gradcheck=" << (pass ? "pass" : "fail") << "\n";
    return pass ? 0 : 1;
}

// --------------------------------------------------------------------- demo

struct DemoArgs {
    std::int32_t channels = 4;
    bool empty = false;
};

int cmd_demo(const RunConfig& cfg, const DemoArgs& args, std::ostream& out) {
    if (args.channels < 1) throw ArgumentError("channels must be >= 1");
    GridSpec spec;
    spec.origin = Eigen::Vector3d::Zero();
    spec.dims = {32, 32, 16};
    spec.extent = Eigen::Vector3d(6.4, 6.4, 3.2);
    spec.num_classes = cfg.grid.num_classes;
    spec.empty_label = cfg.grid.empty_label;
    spec.ignore_label = cfg.grid.ignore_label;

    VoxelLabelGrid grid(spec);
    if (!args.empty) {
        SceneScript script;
        script.frame_count = 1;
        script.points_per_voxel = 2;
        script.seed = cfg.seed;
        BoxTrack wall;
        wall.class_id = static_cast<std::uint16_t>(spec.num_classes - 1);
        wall.instance_id = 1;
        wall.extent = Eigen::Vector3d(0.4, 3.0, 1.2);
        wall.track = {Eigen::Vector3d(4.0, 3.2, 1.0)};
        BoxTrack box;
        box.class_id = 1;
        box.instance_id = 2;
        box.extent = Eigen::Vector3d(0.8, 0.8, 0.8);
        box.track = {Eigen::Vector3d(1.2, 1.6, 0.6)};
        script.objects = {wall, box};
        const GeneratedScene scene = generate(script, spec);
        grid = voxelize_labels(scene.frames[0].cloud, scene.frames[0].labels.semantic,
                               spec);
    }

    // Occupied voxels get seeded per-channel features; empty voxels stay
    // exactly zero so the forward pass can only grow support by dilation.
    FeatureVolume input(spec.dims, args.channels);
    std::size_t occupied_before = 0;
    for (std::size_t lin = 0; lin < grid.labels.size(); ++lin) {
        if (grid.labels[lin] == spec.empty_label) continue;
        ++occupied_before;
        SplitMix64 rng(split_seed(cfg.seed, 7000 + lin));
        for (std::int32_t c = 0; c < args.channels; ++c)
            input.data[lin * static_cast<std::size_t>(args.channels) +
                       static_cast<std::size_t>(c)] = rng.next_in(0.25, 1.0);
    }

    const CompletionParams params =
        seeded_completion_params(args.channels, cfg.seed);
    const FeatureVolume output = completion_forward(input, params, cfg.threads);
    const SparseVoxelTensor sparse = sparsify(output, cfg.epsilon);

    out << "grid=" << spec.dims[0] << "x" << spec.dims[1] << "x" << spec.dims[2]
        << "\n";
    out << "channels=" << args.channels << "\n";
    out << "receptive_radius=" << receptive_radius(params) << "\n";
    out << "occupied_before=" << occupied_before << "\n";
    out << "occupied_after=" << sparse.size() << "\n";
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"semantic scene completion toolkit"};
    app.require_subcommand(1);
    app.fallthrough(true);  // global flags may appear after the subcommand

    std::string config_path, dataset;
    std::uint64_t seed = 0;
    int threads = 0;
    double epsilon = 0.0;
    app.add_option("--config", config_path, "key=value config file");
    app.add_option("--dataset", dataset,
                   "dataset preset: semantickitti, semanticposs, or custom");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed");
    auto* threads_opt = app.add_option("--threads", threads, "worker thread count");
    auto* epsilon_opt =
        app.add_option("--epsilon", epsilon, "non-empty feature threshold");

    AggregateArgs agg;
    auto* agg_cmd =
        app.add_subcommand("aggregate", "fuse a frame range into one label grid");
    agg_cmd->add_option("--scans", agg.scans, "directory of %06d.bin point clouds")
        ->required();
    agg_cmd->add_option("--labels", agg.labels, "directory of %06d.label files")
        ->required();
    agg_cmd->add_option("--poses", agg.poses, "pose file, one 3x4 line per frame")
        ->required();
    agg_cmd->add_option("--start", agg.start, "first frame index");
    agg_cmd->add_option("--count", agg.count, "number of frames")->required();
    agg_cmd->add_option("--out", agg.out, "output voxel grid path")->required();

    RectifyArgs rect;
    auto* rect_cmd =
        app.add_subcommand("rectify", "remove moving-object traces from a label grid");
    rect_cmd->add_option("--grid", rect.grid, "aggregated voxel grid")->required();
    rect_cmd->add_option("--scan", rect.scan, "current-frame point cloud")->required();
    rect_cmd->add_option("--label", rect.label, "current-frame panoptic labels")
        ->required();
    rect_cmd->add_option("--out", rect.out, "output voxel grid path")->required();

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "score predictions against ground truth");
    eval_cmd->add_option("--pred", eval.pred, "directory of predicted grids")
        ->required();
    eval_cmd->add_option("--gt", eval.gt, "directory of ground-truth grids")
        ->required();

    DskdArgs dskd;
    auto* dskd_cmd =
        app.add_subcommand("dskd", "distillation loss between sparse feature tensors");
    dskd_cmd->add_option("--student", dskd.student, "student sparse tensor")
        ->required();
    dskd_cmd->add_option("--teacher", dskd.teacher, "teacher sparse tensor")
        ->required();
    dskd_cmd->add_option("--cap", dskd.cap, "subsample cap on aligned rows");

    GradcheckArgs grad;
    auto* grad_cmd =
        app.add_subcommand("gradcheck", "finite-difference checks of the loss gradients");
    grad_cmd->add_option("--instances", grad.instances, "random instances per suite");
    grad_cmd->add_flag("--flip-sign", grad.flip_sign)->group("");

    DemoArgs demo;
    auto* demo_cmd =
        app.add_subcommand("demo", "forward pass over a seeded synthetic scene");
    demo_cmd->add_option("--channels", demo.channels, "feature channels");
    demo_cmd->add_flag("--empty", demo.empty, "run on an empty scene");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        RunConfig cfg = default_run_config();
        if (!config_path.empty()) {
            cfg = load_run_config(config_path);
        }
        if (!dataset.empty()) apply_dataset(cfg, dataset);
        if (seed_opt->count() > 0) cfg.seed = seed;
        if (threads_opt->count() > 0) cfg.threads = threads;
        if (epsilon_opt->count() > 0) cfg.epsilon = epsilon;
        finalize_run_config(cfg);

        if (*agg_cmd) return cmd_aggregate(cfg, agg, out);
        if (*rect_cmd) return cmd_rectify(cfg, rect, out);
        if (*eval_cmd) return cmd_eval(cfg, eval, out);
        if (*dskd_cmd) return cmd_dskd(cfg, dskd, out);
        if (*grad_cmd) return cmd_gradcheck(cfg, grad, out);
        if (*demo_cmd) return cmd_demo(cfg, demo, out);
        err << "error: no subcommand selected\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace ssc::cli
