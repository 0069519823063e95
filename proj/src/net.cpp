// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#include "ssckit/net.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "ssckit/error.hpp"
#include "ssckit/parallel.hpp"

namespace ssc {

namespace {

constexpr char kWeightsMagic[7] = {'S', 'S', 'C', 'W', 'G', 'T', '1'};

// Kernel slots of the parameter file, in order, with their required k.
struct KernelSlot {
    ConvKernel* kernel;
    std::int32_t k;
};

std::vector<KernelSlot> kernel_slots(CompletionParams& p) {
    return {{&p.upper_mpb.k3, 3}, {&p.upper_mpb.k5, 5}, {&p.upper_mpb.k7, 7},
            {&p.mid_in, 3},       {&p.mid_mpb1.k3, 3},  {&p.mid_mpb1.k5, 5},
            {&p.mid_mpb1.k7, 7},  {&p.mid_mpb2.k3, 3},  {&p.mid_mpb2.k5, 5},
            {&p.mid_mpb2.k7, 7},  {&p.mid_out, 3}};
}

bool voxel_nonzero(const FeatureVolume& v, std::size_t voxel) {
    const double* p = v.data.data() + voxel * v.channels;
    for (std::int32_t c = 0; c < v.channels; ++c)
        if (p[c] != 0.0) return true;
    return false;
}

/// Marks every output voxel within Chebyshev distance r of a nonzero input
/// voxel. Only these cells can receive a nonzero sum; the rest stay exactly
/// zero without ever being touched.
std::vector<std::uint8_t> active_mask(const FeatureVolume& input, std::int32_t r) {
    const auto [L, W, H] = input.dims;
    std::vector<std::uint8_t> mask(input.voxel_count(), 0);
    std::size_t voxel = 0;
    for (std::int32_t x = 0; x < L; ++x) {
        for (std::int32_t y = 0; y < W; ++y) {
            for (std::int32_t z = 0; z < H; ++z, ++voxel) {
                if (!voxel_nonzero(input, voxel)) continue;
                const std::int32_t x0 = std::max(0, x - r), x1 = std::min(L - 1, x + r);
                const std::int32_t y0 = std::max(0, y - r), y1 = std::min(W - 1, y + r);
                const std::int32_t z0 = std::max(0, z - r), z1 = std::min(H - 1, z + r);
                for (std::int32_t ox = x0; ox <= x1; ++ox)
                    for (std::int32_t oy = y0; oy <= y1; ++oy) {
                        std::uint8_t* row =
                            mask.data() + (static_cast<std::size_t>(ox) * W + oy) * H;
                        for (std::int32_t oz = z0; oz <= z1; ++oz) row[oz] = 1;
                    }
            }
        }
    }
    return mask;
}

}  // namespace

void ConvKernel::validate() const {
    if (k != 3 && k != 5 && k != 7) throw ArgumentError("kernel size must be 3, 5, or 7");
    if (cin < 1 || cout < 1) throw ArgumentError("kernel channel counts must be >= 1");
    if (w.size() != weight_count())
        throw ArgumentError("kernel weight count does not match its dims");
    for (double v : w)
        if (!std::isfinite(v)) throw ArgumentError("kernel weight is not finite");
}

std::int32_t MPBParams::radius() const {
    return std::max({k3.radius(), k5.radius(), k7.radius()});
}

void MPBParams::validate() const {
    k3.validate();
    k5.validate();
    k7.validate();
    if (k3.k != 3 || k5.k != 5 || k7.k != 7)
        throw ArgumentError("multi-path block needs kernel sizes 3, 5, 7");
    if (k3.cin != k5.cin || k3.cin != k7.cin || k3.cout != k5.cout ||
        k3.cout != k7.cout)
        throw ArgumentError("multi-path block branches must share channel dims");
}

void CompletionParams::validate() const {
    upper_mpb.validate();
    mid_mpb1.validate();
    mid_mpb2.validate();
    mid_in.validate();
    mid_out.validate();
    if (mid_in.k != 3 || mid_out.k != 3)
        throw ArgumentError("middle-branch entry/exit kernels must have k = 3");
    const std::int32_t cf = mid_in.cin;
    auto slots = kernel_slots(const_cast<CompletionParams&>(*this));
    for (const KernelSlot& slot : slots) {
        if (slot.kernel->cin != cf || slot.kernel->cout != cf)
            throw ArgumentError(
                "completion network requires C_in = C_out on every kernel "
                "(the residual branch adds the input to the output)");
    }
}

FeatureVolume conv3d(const FeatureVolume& input, const ConvKernel& kernel,
                     int threads) {
    kernel.validate();
    if (input.channels != kernel.cin)
        throw ArgumentError("input has " + std::to_string(input.channels) +
                            " channels but kernel expects " +
                            std::to_string(kernel.cin));
    for (std::int32_t d : input.dims)
        if (d < 1) throw ArgumentError("input dims must be >= 1");

    const std::int32_t r = kernel.radius();
    const auto [L, W, H] = input.dims;
    FeatureVolume out(input.dims, kernel.cout);
    const std::vector<std::uint8_t> mask = active_mask(input, r);

    // Gather form: each thread owns a contiguous range of output voxels, so
    // every cell is written exactly once and the per-cell tap order
    // (dx, dy, dz, ci) is fixed — results are bitwise identical for any
    // thread count.
    parallel_for(out.voxel_count(), threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> acc(static_cast<std::size_t>(kernel.cout));
        for (std::size_t cell = begin; cell < end; ++cell) {
            if (!mask[cell]) continue;
            const std::int32_t x = static_cast<std::int32_t>(cell / (W * H));
            const std::int32_t y = static_cast<std::int32_t>((cell / H) % W);
            const std::int32_t z = static_cast<std::int32_t>(cell % H);
            std::fill(acc.begin(), acc.end(), 0.0);
            for (std::int32_t dx = 0; dx < kernel.k; ++dx) {
                const std::int32_t ix = x + dx - r;
                if (ix < 0 || ix >= L) continue;
                for (std::int32_t dy = 0; dy < kernel.k; ++dy) {
                    const std::int32_t iy = y + dy - r;
                    if (iy < 0 || iy >= W) continue;
                    for (std::int32_t dz = 0; dz < kernel.k; ++dz) {
                        const std::int32_t iz = z + dz - r;
                        if (iz < 0 || iz >= H) continue;
                        const double* in_feat =
                            input.data.data() + input.offset(ix, iy, iz);
                        const double* w_base =
                            kernel.w.data() + kernel.offset(dx, dy, dz, 0, 0);
                        for (std::int32_t ci = 0; ci < kernel.cin; ++ci) {
                            const double v = in_feat[ci];
                            if (v == 0.0) continue;  // empty cell: no contribution
                            const double* w_row = w_base +
                                static_cast<std::size_t>(ci) * kernel.cout;
                            for (std::int32_t co = 0; co < kernel.cout; ++co)
                                acc[static_cast<std::size_t>(co)] += v * w_row[co];
                        }
                    }
                }
            }
            double* out_feat = out.data.data() + cell * kernel.cout;
            for (std::int32_t co = 0; co < kernel.cout; ++co)
                out_feat[co] = acc[static_cast<std::size_t>(co)];
        }
    });
    return out;
}

FeatureVolume mpb_forward(const FeatureVolume& input, const MPBParams& params,
                          int threads) {
    params.validate();
    FeatureVolume out = conv3d(input, params.k3, threads);
    const FeatureVolume c5 = conv3d(input, params.k5, threads);
    const FeatureVolume c7 = conv3d(input, params.k7, threads);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = std::max(0.0, (out.data[i] + c5.data[i]) + c7.data[i]);
    return out;
}

FeatureVolume completion_forward(const FeatureVolume& input,
                                 const CompletionParams& params, int threads) {
    params.validate();
    if (input.channels != params.channels())
        throw ArgumentError("input channel count does not match network channels");

    const FeatureVolume upper = mpb_forward(input, params.upper_mpb, threads);
    FeatureVolume mid = conv3d(input, params.mid_in, threads);
    mid = mpb_forward(mid, params.mid_mpb1, threads);
    mid = mpb_forward(mid, params.mid_mpb2, threads);
    mid = conv3d(mid, params.mid_out, threads);

    FeatureVolume out(input.dims, input.channels);
    for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = (upper.data[i] + mid.data[i]) + input.data[i];
    return out;
}

std::int32_t receptive_radius(const CompletionParams& params) {
    const std::int32_t upper = params.upper_mpb.radius();
    const std::int32_t middle = params.mid_in.radius() + params.mid_mpb1.radius() +
                                params.mid_mpb2.radius() + params.mid_out.radius();
    return std::max({upper, middle, 0});
}

ConvKernel seeded_kernel(std::int32_t k, std::int32_t cin, std::int32_t cout,
                         SplitMix64& rng) {
    ConvKernel kernel;
    kernel.k = k;
    kernel.cin = cin;
    kernel.cout = cout;
    kernel.w.resize(kernel.weight_count());
    const double s = 1.0 / std::sqrt(static_cast<double>(k) * k * k * cin);
    for (double& v : kernel.w) v = rng.next_in(-s, s);
    return kernel;
}

CompletionParams seeded_completion_params(std::int32_t channels, std::uint64_t seed) {
    if (channels < 1) throw ArgumentError("channel count must be >= 1");
    SplitMix64 rng(seed);
    CompletionParams params;
    for (KernelSlot& slot : kernel_slots(params))
        *slot.kernel = seeded_kernel(slot.k, channels, channels, rng);
    return params;
}

void write_completion_params(const CompletionParams& params, const std::string& path) {
    params.validate();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out.write(kWeightsMagic, sizeof(kWeightsMagic));
    auto slots = kernel_slots(const_cast<CompletionParams&>(params));
    for (const KernelSlot& slot : slots) {
        const ConvKernel& kernel = *slot.kernel;
        const std::uint32_t head[3] = {static_cast<std::uint32_t>(kernel.k),
                                       static_cast<std::uint32_t>(kernel.cin),
                                       static_cast<std::uint32_t>(kernel.cout)};
        char bytes[4];
        for (std::uint32_t v : head) {
            bytes[0] = static_cast<char>(v & 0xff);
            bytes[1] = static_cast<char>((v >> 8) & 0xff);
            bytes[2] = static_cast<char>((v >> 16) & 0xff);
            bytes[3] = static_cast<char>((v >> 24) & 0xff);
            out.write(bytes, 4);
        }
        for (double v : kernel.w) {
            const std::uint32_t u = std::bit_cast<std::uint32_t>(static_cast<float>(v));
            bytes[0] = static_cast<char>(u & 0xff);
            bytes[1] = static_cast<char>((u >> 8) & 0xff);
            bytes[2] = static_cast<char>((u >> 16) & 0xff);
            bytes[3] = static_cast<char>((u >> 24) & 0xff);
            out.write(bytes, 4);
        }
    }
    if (!out) throw IoError("failed writing file: " + path);
}

CompletionParams read_completion_params(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
    if (buf.size() < sizeof(kWeightsMagic) ||
        std::memcmp(buf.data(), kWeightsMagic, sizeof(kWeightsMagic)) != 0)
        throw FormatError(path + ": bad magic");

    auto get_u32 = [&](std::size_t at) {
        return static_cast<std::uint32_t>(buf[at]) |
               (static_cast<std::uint32_t>(buf[at + 1]) << 8) |
               (static_cast<std::uint32_t>(buf[at + 2]) << 16) |
               (static_cast<std::uint32_t>(buf[at + 3]) << 24);
    };

    CompletionParams params;
    auto slots = kernel_slots(params);
    std::size_t at = sizeof(kWeightsMagic);
    for (std::size_t s = 0; s < slots.size(); ++s) {
        if (at + 12 > buf.size())
            throw FormatError(path + ": truncated kernel header (kernel " +
                              std::to_string(s) + ")");
        const std::uint32_t k = get_u32(at);
        const std::uint32_t cin = get_u32(at + 4);
        const std::uint32_t cout = get_u32(at + 8);
        at += 12;
        if (k != static_cast<std::uint32_t>(slots[s].k))
            throw DataError(path + ": kernel " + std::to_string(s) + " must have k=" +
                            std::to_string(slots[s].k) + ", found " + std::to_string(k));
        if (cin == 0 || cout == 0 || cin > 1 << 16 || cout > 1 << 16)
            throw FormatError(path + ": implausible channel count in kernel " +
                              std::to_string(s));
        const std::size_t n = static_cast<std::size_t>(k) * k * k * cin * cout;
        if (at + n * 4 > buf.size())
            throw FormatError(path + ": truncated weights (kernel " + std::to_string(s) +
                              ")");
        ConvKernel& kernel = *slots[s].kernel;
        kernel.k = static_cast<std::int32_t>(k);
        kernel.cin = static_cast<std::int32_t>(cin);
        kernel.cout = static_cast<std::int32_t>(cout);
        kernel.w.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const float f = std::bit_cast<float>(get_u32(at + i * 4));
            if (!std::isfinite(f))
                throw DataError(path + ": non-finite weight in kernel " +
                                std::to_string(s));
            kernel.w[i] = f;
        }
        at += n * 4;
    }
    if (at != buf.size())
        throw FormatError(path + ": " + std::to_string(buf.size() - at) +
                          " trailing bytes after the last kernel");
    try {
        params.validate();
    } catch (const Error& e) {
        throw DataError(path + ": " + e.what());
    }
    return params;
}

}  // namespace ssc
