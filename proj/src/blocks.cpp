#include "swnet/blocks.hpp"

#include <stdexcept>

namespace swnet::blocks {

void init_residual_block(ParamSet& ps, const std::string& prefix, int channels, Rng& rng) {
    init_conv(ps, prefix + ".conv", channels, channels, 3, 3, rng);
    init_instance_norm(ps, prefix + ".in", channels);
}

ResidualBlockParams bind_residual_block(ParamBinder& bind, const std::string& prefix,
                                        int channels) {
    ResidualBlockParams p;
    p.conv_w = bind(prefix + ".conv.w", {channels, channels, 3, 3});
    p.conv_b = bind(prefix + ".conv.b", {channels});
    p.in_gamma = bind(prefix + ".in.gamma", {channels});
    p.in_beta = bind(prefix + ".in.beta", {channels});
    return p;
}

void init_conv_block(ParamSet& ps, const std::string& prefix, int c_in, int c_out, Rng& rng) {
    init_conv(ps, prefix + ".proj", c_out, c_in, 1, 1, rng);
    init_residual_block(ps, prefix + ".res1", c_out, rng);
    init_residual_block(ps, prefix + ".res2", c_out, rng);
}

ConvBlockParams bind_conv_block(ParamBinder& bind, const std::string& prefix, int c_in,
                                int c_out) {
    ConvBlockParams p;
    p.proj_w = bind(prefix + ".proj.w", {c_out, c_in, 1, 1});
    p.proj_b = bind(prefix + ".proj.b", {c_out});
    p.res1 = bind_residual_block(bind, prefix + ".res1", c_out);
    p.res2 = bind_residual_block(bind, prefix + ".res2", c_out);
    return p;
}

ad::Var residual_block(const ad::Var& x, const ResidualBlockParams& p) {
    if (x->value.rank() != 3 || x->value.dim(0) != p.conv_w->value.dim(1))
        throw std::invalid_argument("residual_block: input channels do not match parameters");
    auto branch = ad::conv2d(x, p.conv_w, p.conv_b, 1, 1);
    branch = ad::instance_norm(branch, p.in_gamma, p.in_beta, kInstanceNormEps);
    branch = ad::leaky_relu(branch, kLeakySlope);
    return ad::add(branch, x);
}

ad::Var conv_block(const ad::Var& x, const ConvBlockParams& p) {
    if (x->value.rank() != 3 || x->value.dim(0) != p.proj_w->value.dim(1))
        throw std::invalid_argument("conv_block: input channels do not match projection");
    auto y = ad::conv2d(x, p.proj_w, p.proj_b, 1, 0);
    y = residual_block(y, p.res1);
    y = residual_block(y, p.res2);
    return y;
}

}  // namespace swnet::blocks
