#pragma once

#include <vector>

#include "swnet/tensor.hpp"

namespace swnet::ops {

/// k x k max pooling over a (H,W) map, replicate padding, output size = input.
Tensor maxpool(const Tensor& m, int k);
/// k x k min pooling, replicate padding.
Tensor minpool(const Tensor& m, int k);
/// k x k box mean, replicate padding. Exact (integer sums) on binary input.
Tensor boxmean(const Tensor& m, int k);

/// Half-pixel-centre bilinear resize of a (C,H,W) tensor.
Tensor resize_bilinear(const Tensor& t, int out_h, int out_w);
/// Nearest-neighbour resize of a (H,W) map.
Tensor resize_nearest(const Tensor& t, int out_h, int out_w);

Tensor sigmoid_map(const Tensor& t);
Tensor clamp01(const Tensor& t);

/// True when every element is exactly 0 or 1.
bool is_binary(const Tensor& t);

}  // namespace swnet::ops
