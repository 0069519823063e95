// Copyright Contributors to the ssckit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssckit/grid.hpp"
#include "ssckit/rng.hpp"

namespace ssc {

/// Dense 3D convolution kernel. No bias term and no normalization follow it:
/// that is what lets the network map empty (all-zero) regions to exact zeros,
/// so occupancy can only grow by kernel dilation.
struct ConvKernel {
    std::int32_t k = 3;      // spatial size, odd
    std::int32_t cin = 0;    // input channels
    std::int32_t cout = 0;   // output channels
    std::vector<double> w;   // (kx, ky, kz, ci, co) order, co innermost

    std::size_t weight_count() const {
        return static_cast<std::size_t>(k) * k * k * cin * cout;
    }

    std::size_t offset(std::int32_t kx, std::int32_t ky, std::int32_t kz,
                       std::int32_t ci, std::int32_t co) const {
        return ((((static_cast<std::size_t>(kx) * k + ky) * k + kz) * cin + ci) *
                    cout +
                co);
    }

    double at(std::int32_t kx, std::int32_t ky, std::int32_t kz, std::int32_t ci,
              std::int32_t co) const {
        return w[offset(kx, ky, kz, ci, co)];
    }

    /// Half-width (k-1)/2: how far one application spreads support.
    std::int32_t radius() const { return (k - 1) / 2; }

    void validate() const;
};

/// Multi-path block: parallel 3/5/7 kernels over the same input, summed,
/// then rectified.
struct MPBParams {
    ConvKernel k3;  // k = 3
    ConvKernel k5;  // k = 5
    ConvKernel k7;  // k = 7

    /// Support growth of the block: max branch radius = 3.
    std::int32_t radius() const;

    void validate() const;
};

/// Parameters of the completion network. Three branches over the input:
/// upper = one MPB; middle = conv3 -> MPB -> MPB -> conv3; bottom = the
/// input itself (residual). Branch outputs are summed. Every kernel has
/// C_in = C_out so the residual add is well-formed, and no layer changes
/// the spatial dims (stride 1, symmetric zero padding, no resampling).
struct CompletionParams {
    MPBParams upper_mpb;
    ConvKernel mid_in;   // k = 3
    MPBParams mid_mpb1;
    MPBParams mid_mpb2;
    ConvKernel mid_out;  // k = 3

    std::int32_t channels() const { return mid_in.cin; }

    void validate() const;
};

/// Cross-correlation with stride 1 and symmetric zero padding of
/// kernel.radius() per side; output dims equal input dims. No bias, no
/// normalization, no activation. Implementation skips regions the input
/// support cannot reach, leaving them exactly zero; values on reachable
/// cells match the naive dense sum (fixed tap order, so results are
/// bitwise reproducible for any thread count).
///
/// Throws ArgumentError when input channels do not match kernel.cin.
FeatureVolume conv3d(const FeatureVolume& input, const ConvKernel& kernel,
                     int threads = 1);

/// Elementwise sum of the three parallel convolutions, then max(., 0).
FeatureVolume mpb_forward(const FeatureVolume& input, const MPBParams& params,
                          int threads = 1);

/// upper_mpb(input) + mid_out(mid_mpb2(mid_mpb1(mid_in(input)))) + input,
/// summed in that fixed order.
FeatureVolume completion_forward(const FeatureVolume& input,
                                 const CompletionParams& params, int threads = 1);

/// Total support-growth radius of completion_forward: the max over branches
/// of the summed per-layer radii (upper 3, middle 1+3+3+1 = 8, residual 0).
std::int32_t receptive_radius(const CompletionParams& params);

/// Deterministic kernel initialization for demos: weights uniform in
/// [-s, s] with s = 1/sqrt(k^3 * cin), drawn from `rng` in weight order.
ConvKernel seeded_kernel(std::int32_t k, std::int32_t cin, std::int32_t cout,
                         SplitMix64& rng);

/// Full parameter set with C_in = C_out = channels, drawn from one seeded
/// stream in a fixed kernel order (the same order the parameter file uses).
CompletionParams seeded_completion_params(std::int32_t channels,
                                          std::uint64_t seed);

/// Parameter container: 7-byte magic "SSCWGT1", then the 11 kernels in fixed
/// order (upper 3/5/7; mid_in; mpb1 3/5/7; mpb2 3/5/7; mid_out), each as
/// little-endian u32 k, C_in, C_out followed by k^3*C_in*C_out little-endian
/// f32 weights in (kx, ky, kz, cin, cout) order.
void write_completion_params(const CompletionParams& params, const std::string& path);
CompletionParams read_completion_params(const std::string& path);

}  // namespace ssc
