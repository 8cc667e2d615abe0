#pragma once

#include <map>
#include <string>
#include <vector>

#include "swnet/autodiff.hpp"
#include "swnet/rng.hpp"
#include "swnet/tensor.hpp"

namespace swnet {

/// Flat dotted-name -> value map; the unit of initialization, checkpointing
/// and optimization.
using ParamSet = std::map<std::string, Tensor>;
using GradMap = std::map<std::string, Tensor>;

/// Binds parameter values into leaf Vars for one forward pass, recording the
/// leaves so gradients can be collected afterwards. Each binder owns copies of
/// the values, so concurrent binders on distinct threads never alias.
class ParamBinder {
public:
    explicit ParamBinder(const ParamSet& params, bool trainable = true)
        : params_(params), trainable_(trainable) {}

    ad::Var operator()(const std::string& name, const std::vector<int>& expected_shape);

    const std::map<std::string, ad::Var>& bound() const { return bound_; }

    /// Accumulates the gradient of every bound leaf into `grads` (allocating
    /// zero tensors on first touch). Leaves never touched by backward
    /// contribute zero.
    void accumulate_grads(GradMap& grads) const;

private:
    const ParamSet& params_;
    bool trainable_;
    std::map<std::string, ad::Var> bound_;
};

// ---- initializers -----------------------------------------------------------

/// He-style init for a conv kernel (cout,cin,kh,kw) plus zero bias.
void init_conv(ParamSet& ps, const std::string& prefix, int cout, int cin, int kh, int kw,
               Rng& rng, bool with_bias = true);
/// gamma = 1, beta = 0.
void init_instance_norm(ParamSet& ps, const std::string& prefix, int channels);

size_t parameter_count(const ParamSet& ps);

}  // namespace swnet
