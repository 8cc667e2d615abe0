#include "swnet/attention.hpp"

#include <stdexcept>

namespace swnet::attention {
namespace {

void check_ratio(int channels, int ratio) {
    if (ratio <= 0 || channels % ratio != 0 || channels / ratio < 1)
        throw std::invalid_argument("cbam: reduction ratio " + std::to_string(ratio) +
                                    " does not divide channel count " + std::to_string(channels));
}

ad::Var shared_mlp(const ad::Var& pooled, const CbamParams& p) {
    // pooled descriptor is a (C,1,1) map; the MLP is two 1x1 convolutions
    auto h = ad::conv2d(pooled, p.mlp_w1, ad::Var(), 1, 0);
    h = ad::relu(h);
    return ad::conv2d(h, p.mlp_w2, p.mlp_b2, 1, 0);
}

}  // namespace

void init_cbam(ParamSet& ps, const std::string& prefix, int channels, int ratio, Rng& rng) {
    check_ratio(channels, ratio);
    const int hidden = channels / ratio;
    init_conv(ps, prefix + ".mlp1", hidden, channels, 1, 1, rng, /*with_bias=*/false);
    init_conv(ps, prefix + ".mlp2", channels, hidden, 1, 1, rng);
    init_conv(ps, prefix + ".spatial", 1, 2, 7, 7, rng);
}

CbamParams bind_cbam(ParamBinder& bind, const std::string& prefix, int channels, int ratio) {
    check_ratio(channels, ratio);
    const int hidden = channels / ratio;
    CbamParams p;
    p.mlp_w1 = bind(prefix + ".mlp1.w", {hidden, channels, 1, 1});
    p.mlp_w2 = bind(prefix + ".mlp2.w", {channels, hidden, 1, 1});
    p.mlp_b2 = bind(prefix + ".mlp2.b", {channels});
    p.spatial_w = bind(prefix + ".spatial.w", {1, 2, 7, 7});
    p.spatial_b = bind(prefix + ".spatial.b", {1});
    return p;
}

ad::Var channel_gate(const ad::Var& x, const CbamParams& p) {
    auto avg = ad::global_avg_pool(x);
    auto mx = ad::global_max_pool(x);
    auto attn = ad::sigmoid(ad::add(shared_mlp(avg, p), shared_mlp(mx, p)));
    return ad::mul_channel(x, attn);
}

ad::Var spatial_gate(const ad::Var& x, const CbamParams& p) {
    auto pooled = ad::concat_channels({ad::channel_mean(x), ad::channel_max(x)});
    auto attn = ad::sigmoid(ad::conv2d(pooled, p.spatial_w, p.spatial_b, 1, 3));
    return ad::mul_spatial(x, attn);
}

ad::Var cbam(const ad::Var& x, const CbamParams& p, bool enabled) {
    if (!enabled) return x;
    return spatial_gate(channel_gate(x, p), p);
}

}  // namespace swnet::attention
