#pragma once

#include "swnet/params.hpp"

namespace swnet::blocks {

inline constexpr real kLeakySlope = 0.01;
inline constexpr real kInstanceNormEps = 1e-5;

/// conv3x3 (C->C) + instance norm affine pair.
struct ResidualBlockParams {
    ad::Var conv_w, conv_b, in_gamma, in_beta;
};

/// 1x1 projection (C_in->C) followed by two residual blocks at width C.
struct ConvBlockParams {
    ad::Var proj_w, proj_b;
    ResidualBlockParams res1, res2;
};

void init_residual_block(ParamSet& ps, const std::string& prefix, int channels, Rng& rng);
ResidualBlockParams bind_residual_block(ParamBinder& bind, const std::string& prefix,
                                        int channels);

void init_conv_block(ParamSet& ps, const std::string& prefix, int c_in, int c_out, Rng& rng);
ConvBlockParams bind_conv_block(ParamBinder& bind, const std::string& prefix, int c_in,
                                int c_out);

/// y = LeakyReLU(InstanceNorm(Conv3x3(x))) + x
ad::Var residual_block(const ad::Var& x, const ResidualBlockParams& p);

/// y = res2(res1(Conv1x1(x))); spatial size unchanged.
ad::Var conv_block(const ad::Var& x, const ConvBlockParams& p);

}  // namespace swnet::blocks
