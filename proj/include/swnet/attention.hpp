#pragma once

#include "swnet/params.hpp"

namespace swnet::attention {

/// CBAM parameters: shared two-layer MLP (C -> C/r -> C) for the channel
/// gate, 7x7 conv (2 -> 1) for the spatial gate. The hidden layer is
/// bias-free; the output layer carries a bias.
struct CbamParams {
    ad::Var mlp_w1;            // (C/r, C, 1, 1)
    ad::Var mlp_w2, mlp_b2;    // (C, C/r, 1, 1), (C)
    ad::Var spatial_w, spatial_b;  // (1, 2, 7, 7), (1)
};

/// Throws std::invalid_argument unless ratio divides channels with a hidden
/// width of at least one.
void init_cbam(ParamSet& ps, const std::string& prefix, int channels, int ratio, Rng& rng);
CbamParams bind_cbam(ParamBinder& bind, const std::string& prefix, int channels, int ratio);

/// x * sigmoid(MLP(avgpool(x)) + MLP(maxpool(x))), broadcast over space.
ad::Var channel_gate(const ad::Var& x, const CbamParams& p);

/// x * sigmoid(Conv7x7([mean_c(x); max_c(x)])), broadcast over channels.
ad::Var spatial_gate(const ad::Var& x, const CbamParams& p);

/// spatial_gate(channel_gate(x)). `enabled = false` is the ablation
/// pass-through and returns x unchanged.
ad::Var cbam(const ad::Var& x, const CbamParams& p, bool enabled = true);

}  // namespace swnet::attention
