#include "swnet/tensor_ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swnet::ops {
namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

template <typename Reduce>
Tensor pool2d(const Tensor& m, int k, Reduce reduce) {
    if (m.rank() != 2) throw std::invalid_argument("pool2d: expected (H,W)");
    const int h = m.dim(0), w = m.dim(1), r = k / 2;
    Tensor out(m.shape());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            real acc = m.at(clampi(y - r, 0, h - 1), clampi(x - r, 0, w - 1));
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx)
                    acc = reduce(acc, m.at(clampi(y + dy, 0, h - 1), clampi(x + dx, 0, w - 1)));
            out.at(y, x) = acc;
        }
    return out;
}

}  // namespace

Tensor maxpool(const Tensor& m, int k) {
    return pool2d(m, k, [](real a, real b) { return a > b ? a : b; });
}

Tensor minpool(const Tensor& m, int k) {
    return pool2d(m, k, [](real a, real b) { return a < b ? a : b; });
}

Tensor boxmean(const Tensor& m, int k) {
    if (m.rank() != 2) throw std::invalid_argument("boxmean: expected (H,W)");
    const int h = m.dim(0), w = m.dim(1), r = k / 2;
    // separable: horizontal window sums, then vertical, with clamped indices
    Tensor rows(m.shape());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            real acc = 0;
            for (int dx = -r; dx <= r; ++dx) acc += m.at(y, clampi(x + dx, 0, w - 1));
            rows.at(y, x) = acc;
        }
    Tensor out(m.shape());
    const real norm = real(1) / (static_cast<real>(k) * k);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            real acc = 0;
            for (int dy = -r; dy <= r; ++dy) acc += rows.at(clampi(y + dy, 0, h - 1), x);
            out.at(y, x) = acc * norm;
        }
    return out;
}

Tensor resize_bilinear(const Tensor& t, int out_h, int out_w) {
    if (t.rank() != 3) throw std::invalid_argument("resize_bilinear: expected (C,H,W)");
    const int c = t.dim(0), hi = t.dim(1), wi = t.dim(2);
    Tensor out({c, out_h, out_w});
    const real sy = static_cast<real>(hi) / out_h;
    const real sx = static_cast<real>(wi) / out_w;
    for (int ch = 0; ch < c; ++ch)
        for (int oy = 0; oy < out_h; ++oy) {
            real py = (oy + real(0.5)) * sy - real(0.5);
            if (py < 0) py = 0;
            int y0 = std::min(static_cast<int>(py), hi - 1);
            const int y1 = std::min(y0 + 1, hi - 1);
            const real fy = py - y0;
            for (int ox = 0; ox < out_w; ++ox) {
                real px = (ox + real(0.5)) * sx - real(0.5);
                if (px < 0) px = 0;
                int x0 = std::min(static_cast<int>(px), wi - 1);
                const int x1 = std::min(x0 + 1, wi - 1);
                const real fx = px - x0;
                const real v0 = t.at(ch, y0, x0) * (1 - fx) + t.at(ch, y0, x1) * fx;
                const real v1 = t.at(ch, y1, x0) * (1 - fx) + t.at(ch, y1, x1) * fx;
                out.at(ch, oy, ox) = v0 * (1 - fy) + v1 * fy;
            }
        }
    return out;
}

Tensor resize_nearest(const Tensor& t, int out_h, int out_w) {
    if (t.rank() != 2) throw std::invalid_argument("resize_nearest: expected (H,W)");
    const int hi = t.dim(0), wi = t.dim(1);
    Tensor out({out_h, out_w});
    const real sy = static_cast<real>(hi) / out_h;
    const real sx = static_cast<real>(wi) / out_w;
    for (int oy = 0; oy < out_h; ++oy) {
        const int y = std::min(static_cast<int>((oy + real(0.5)) * sy), hi - 1);
        for (int ox = 0; ox < out_w; ++ox) {
            const int x = std::min(static_cast<int>((ox + real(0.5)) * sx), wi - 1);
            out.at(oy, ox) = t.at(y, x);
        }
    }
    return out;
}

Tensor sigmoid_map(const Tensor& t) {
    Tensor out(t.shape());
    for (size_t i = 0; i < t.size(); ++i) {
        const real z = t[i];
        out[i] = z >= 0 ? real(1) / (real(1) + std::exp(-z))
                        : std::exp(z) / (real(1) + std::exp(z));
    }
    return out;
}

Tensor clamp01(const Tensor& t) {
    Tensor out(t.shape());
    for (size_t i = 0; i < t.size(); ++i) out[i] = std::clamp(t[i], real(0), real(1));
    return out;
}

bool is_binary(const Tensor& t) {
    for (size_t i = 0; i < t.size(); ++i)
        if (t[i] != real(0) && t[i] != real(1)) return false;
    return true;
}

}  // namespace swnet::ops
