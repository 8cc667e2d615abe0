#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "swnet/tensor.hpp"

namespace swnet::ad {

/// Reverse-mode autodiff over Tensors. A forward pass builds a DAG of Nodes;
/// backward() runs the stored closures in reverse topological order. Graphs
/// are per-evaluation and independent, so distinct samples can be processed
/// on distinct threads as long as their leaves do not alias writable state.
struct Node {
    Tensor value;
    Tensor grad;  // allocated on first use, same shape as value
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backfn;

    Tensor& ensure_grad() {
        if (grad.size() != value.size()) grad = Tensor(value.shape());
        return grad;
    }
};

using Var = std::shared_ptr<Node>;

Var leaf(Tensor value, bool requires_grad);
Var constant(Tensor value);

/// Accumulates gradients of a scalar root into every reachable node that
/// requires them. May be called once per graph.
void backward(const Var& root);

// ---- arithmetic -----------------------------------------------------------

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& x, real alpha);

// ---- activations ----------------------------------------------------------

Var leaky_relu(const Var& x, real slope);
Var relu(const Var& x);
Var sigmoid(const Var& x);

// ---- structure ------------------------------------------------------------

/// x: (Cin,H,W); w: (Cout,Cin,kh,kw); bias: (Cout) or empty Var for none.
Var conv2d(const Var& x, const Var& w, const Var& bias, int stride, int pad);

/// Per-channel normalization over the spatial extent, with affine scale/shift.
Var instance_norm(const Var& x, const Var& gamma, const Var& beta, real eps);

Var concat_channels(const std::vector<Var>& xs);

/// Half-pixel-centre bilinear resampling to (out_h, out_w); exact identity
/// when the size is unchanged, exact on constant maps.
Var upsample_bilinear(const Var& x, int out_h, int out_w);

// ---- pooling and broadcasts ----------------------------------------------

Var global_avg_pool(const Var& x);  // (C,H,W) -> (C,1,1)
Var global_max_pool(const Var& x);  // (C,H,W) -> (C,1,1); ties -> lowest index
Var channel_mean(const Var& x);     // (C,H,W) -> (1,H,W)
Var channel_max(const Var& x);      // (C,H,W) -> (1,H,W); ties -> lowest index
Var mul_channel(const Var& x, const Var& gate);   // gate (C,1,1)
Var mul_spatial(const Var& x, const Var& gate);   // gate (1,H,W)

// ---- reductions -----------------------------------------------------------

Var sum_all(const Var& x);   // -> shape {1}
Var mean_all(const Var& x);  // -> shape {1}

// ---- fused segmentation losses --------------------------------------------

enum class BceNormalize { weight_sum, pixel_count };

/// Numerically stable binary cross-entropy on logits with per-pixel weights.
/// Target must be strictly {0,1}. Returns a scalar Var.
Var weighted_bce_logits(const Var& logits, const Tensor& target, const Tensor& weights,
                        BceNormalize normalize);

/// 1 - (intersection+1)/(union+1) on sigmoid probabilities, with per-pixel
/// weights on both terms. Target must be strictly {0,1}. Returns a scalar Var.
Var weighted_iou_logits(const Var& logits, const Tensor& target, const Tensor& weights);

}  // namespace swnet::ad
