#include "swnet/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "swnet/kernels.hpp"

namespace swnet::ad {
namespace {

bool any_requires_grad(const std::vector<Var>& parents) {
    for (const auto& p : parents)
        if (p->requires_grad) return true;
    return false;
}

/// Builds an interior node. The backfn is only attached when some parent
/// actually needs gradients, so inference passes carry no tape.
Var make_node(Tensor value, std::vector<Var> parents, std::function<void(Node&)> backfn) {
    auto node = std::make_shared<Node>();
    node->value = std::move(value);
    if (any_requires_grad(parents)) {
        node->requires_grad = true;
        node->parents = std::move(parents);
        node->backfn = std::move(backfn);
    }
    return node;
}

void check_binary_target(const Tensor& target, const char* what) {
    for (size_t i = 0; i < target.size(); ++i)
        if (target[i] != real(0) && target[i] != real(1))
            throw std::invalid_argument(std::string(what) + ": target values must be 0 or 1");
}

real stable_sigmoid(real z) {
    if (z >= 0) return real(1) / (real(1) + std::exp(-z));
    const real e = std::exp(z);
    return e / (real(1) + e);
}

// log(1 + exp(-|z|)) + max(z, 0) - z*y, the standard stable logit BCE
real logit_bce(real z, real y) {
    return std::max(z, real(0)) - z * y + std::log1p(std::exp(-std::abs(z)));
}

struct ConvDims {
    int cin, h, w, cout, kh, kw, ho, wo;
};

ConvDims conv_dims(const Tensor& x, const Tensor& w, int stride, int pad) {
    if (x.rank() != 3) throw std::invalid_argument("conv2d: input must be (C,H,W)");
    if (w.rank() != 4) throw std::invalid_argument("conv2d: weight must be (Cout,Cin,kh,kw)");
    ConvDims d;
    d.cin = x.dim(0);
    d.h = x.dim(1);
    d.w = x.dim(2);
    d.cout = w.dim(0);
    d.kh = w.dim(2);
    d.kw = w.dim(3);
    if (w.dim(1) != d.cin)
        throw std::invalid_argument("conv2d: channel mismatch, input has " +
                                    std::to_string(d.cin) + " channels but weight expects " +
                                    std::to_string(w.dim(1)));
    d.ho = (d.h + 2 * pad - d.kh) / stride + 1;
    d.wo = (d.w + 2 * pad - d.kw) / stride + 1;
    if (d.ho <= 0 || d.wo <= 0) throw std::invalid_argument("conv2d: output would be empty");
    return d;
}

// cols is (Cin*kh*kw) x (Ho*Wo); zero padding materializes as zero rows.
void im2col(const Tensor& x, const ConvDims& d, int stride, int pad, std::vector<real>& cols) {
    const int hw = d.ho * d.wo;
    cols.assign(static_cast<size_t>(d.cin) * d.kh * d.kw * hw, real(0));
    const real* src = x.data();
    for (int c = 0; c < d.cin; ++c) {
        for (int di = 0; di < d.kh; ++di) {
            for (int dj = 0; dj < d.kw; ++dj) {
                real* dst = cols.data() + (static_cast<size_t>(c) * d.kh * d.kw +
                                           static_cast<size_t>(di) * d.kw + dj) * hw;
                for (int oy = 0; oy < d.ho; ++oy) {
                    const int iy = oy * stride + di - pad;
                    if (iy < 0 || iy >= d.h) continue;
                    const real* srow = src + (static_cast<size_t>(c) * d.h + iy) * d.w;
                    real* drow = dst + static_cast<size_t>(oy) * d.wo;
                    for (int ox = 0; ox < d.wo; ++ox) {
                        const int ix = ox * stride + dj - pad;
                        if (ix >= 0 && ix < d.w) drow[ox] = srow[ix];
                    }
                }
            }
        }
    }
}

void col2im_acc(const std::vector<real>& cols, const ConvDims& d, int stride, int pad,
                Tensor& dx) {
    const int hw = d.ho * d.wo;
    real* dst = dx.data();
    for (int c = 0; c < d.cin; ++c) {
        for (int di = 0; di < d.kh; ++di) {
            for (int dj = 0; dj < d.kw; ++dj) {
                const real* src = cols.data() + (static_cast<size_t>(c) * d.kh * d.kw +
                                                 static_cast<size_t>(di) * d.kw + dj) * hw;
                for (int oy = 0; oy < d.ho; ++oy) {
                    const int iy = oy * stride + di - pad;
                    if (iy < 0 || iy >= d.h) continue;
                    real* drow = dst + (static_cast<size_t>(c) * d.h + iy) * d.w;
                    const real* srow = src + static_cast<size_t>(oy) * d.wo;
                    for (int ox = 0; ox < d.wo; ++ox) {
                        const int ix = ox * stride + dj - pad;
                        if (ix >= 0 && ix < d.w) drow[ix] += srow[ox];
                    }
                }
            }
        }
    }
}

struct LerpAxis {
    std::vector<int> i0, i1;
    std::vector<real> f;  // weight of i1
};

LerpAxis lerp_axis(int in, int out) {
    LerpAxis a;
    a.i0.resize(out);
    a.i1.resize(out);
    a.f.resize(out);
    const real s = static_cast<real>(in) / static_cast<real>(out);
    for (int d = 0; d < out; ++d) {
        real pos = (static_cast<real>(d) + real(0.5)) * s - real(0.5);
        if (pos < 0) pos = 0;
        int lo = static_cast<int>(pos);
        if (lo > in - 1) lo = in - 1;
        int hi = std::min(lo + 1, in - 1);
        a.i0[d] = lo;
        a.i1[d] = hi;
        a.f[d] = pos - static_cast<real>(lo);
    }
    return a;
}

}  // namespace

Var leaf(Tensor value, bool requires_grad) {
    auto node = std::make_shared<Node>();
    node->value = std::move(value);
    node->requires_grad = requires_grad;
    return node;
}

Var constant(Tensor value) { return leaf(std::move(value), false); }

void backward(const Var& root) {
    if (!root) throw std::invalid_argument("backward: null root");
    if (root->value.size() != 1) throw std::invalid_argument("backward: root must be scalar");
    if (!root->requires_grad) return;

    // iterative post-order DFS
    std::vector<Node*> order;
    std::unordered_set<Node*> visited;
    struct Frame {
        Node* node;
        size_t next_child;
    };
    std::vector<Frame> stack;
    stack.push_back({root.get(), 0});
    visited.insert(root.get());
    while (!stack.empty()) {
        Frame& fr = stack.back();
        if (fr.next_child < fr.node->parents.size()) {
            Node* child = fr.node->parents[fr.next_child++].get();
            if (child->requires_grad && visited.insert(child).second)
                stack.push_back({child, 0});
        } else {
            order.push_back(fr.node);
            stack.pop_back();
        }
    }

    root->ensure_grad()[0] = real(1);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* n = *it;
        if (n->backfn) n->backfn(*n);
    }
}

// ---- arithmetic -----------------------------------------------------------

Var add(const Var& a, const Var& b) {
    require_same_shape(a->value, b->value, "add");
    Tensor out(a->value.shape());
    kern::kernels().add(a->value.data(), b->value.data(), out.data(), out.size());
    Node* pa = a.get();
    Node* pb = b.get();
    return make_node(std::move(out), {a, b}, [pa, pb](Node& n) {
        if (pa->requires_grad)
            kern::kernels().axpy(1, n.grad.data(), pa->ensure_grad().data(), n.grad.size());
        if (pb->requires_grad)
            kern::kernels().axpy(1, n.grad.data(), pb->ensure_grad().data(), n.grad.size());
    });
}

Var sub(const Var& a, const Var& b) {
    require_same_shape(a->value, b->value, "sub");
    Tensor out(a->value.shape());
    kern::kernels().sub(a->value.data(), b->value.data(), out.data(), out.size());
    Node* pa = a.get();
    Node* pb = b.get();
    return make_node(std::move(out), {a, b}, [pa, pb](Node& n) {
        if (pa->requires_grad)
            kern::kernels().axpy(1, n.grad.data(), pa->ensure_grad().data(), n.grad.size());
        if (pb->requires_grad)
            kern::kernels().axpy(-1, n.grad.data(), pb->ensure_grad().data(), n.grad.size());
    });
}

Var mul(const Var& a, const Var& b) {
    require_same_shape(a->value, b->value, "mul");
    Tensor out(a->value.shape());
    kern::kernels().mul(a->value.data(), b->value.data(), out.data(), out.size());
    Node* pa = a.get();
    Node* pb = b.get();
    return make_node(std::move(out), {a, b}, [pa, pb](Node& n) {
        const size_t sz = n.grad.size();
        if (pa->requires_grad) {
            real* g = pa->ensure_grad().data();
            const real* gy = n.grad.data();
            const real* bv = pb->value.data();
            for (size_t i = 0; i < sz; ++i) g[i] += gy[i] * bv[i];
        }
        if (pb->requires_grad) {
            real* g = pb->ensure_grad().data();
            const real* gy = n.grad.data();
            const real* av = pa->value.data();
            for (size_t i = 0; i < sz; ++i) g[i] += gy[i] * av[i];
        }
    });
}

Var scale(const Var& x, real alpha) {
    Tensor out(x->value.shape());
    kern::kernels().scale(x->value.data(), alpha, out.data(), out.size());
    Node* px = x.get();
    return make_node(std::move(out), {x}, [px, alpha](Node& n) {
        kern::kernels().axpy(alpha, n.grad.data(), px->ensure_grad().data(), n.grad.size());
    });
}

// ---- activations ----------------------------------------------------------

Var leaky_relu(const Var& x, real slope) {
    Tensor out(x->value.shape());
    const real* xin = x->value.data();
    for (size_t i = 0; i < out.size(); ++i) out[i] = xin[i] > 0 ? xin[i] : slope * xin[i];
    Node* px = x.get();
    return make_node(std::move(out), {x}, [px, slope](Node& n) {
        real* g = px->ensure_grad().data();
        const real* gy = n.grad.data();
        const real* xv = px->value.data();
        for (size_t i = 0; i < n.grad.size(); ++i) g[i] += gy[i] * (xv[i] > 0 ? real(1) : slope);
    });
}

Var relu(const Var& x) { return leaky_relu(x, real(0)); }

Var sigmoid(const Var& x) {
    Tensor out(x->value.shape());
    const real* xin = x->value.data();
    for (size_t i = 0; i < out.size(); ++i) out[i] = stable_sigmoid(xin[i]);
    Node* px = x.get();
    return make_node(std::move(out), {x}, [px](Node& n) {
        real* g = px->ensure_grad().data();
        const real* gy = n.grad.data();
        const real* yv = n.value.data();
        for (size_t i = 0; i < n.grad.size(); ++i) g[i] += gy[i] * yv[i] * (real(1) - yv[i]);
    });
}

// ---- convolution ----------------------------------------------------------

Var conv2d(const Var& x, const Var& w, const Var& bias, int stride, int pad) {
    const ConvDims d = conv_dims(x->value, w->value, stride, pad);
    const bool has_bias = bias && bias->value.size() > 0;
    if (has_bias && (bias->value.rank() != 1 || bias->value.dim(0) != d.cout))
        throw std::invalid_argument("conv2d: bias shape mismatch");

    const int hw = d.ho * d.wo;
    const int kdim = d.cin * d.kh * d.kw;
    const bool pointwise = (d.kh == 1 && d.kw == 1 && stride == 1 && pad == 0);

    Tensor out({d.cout, d.ho, d.wo});
    {
        std::vector<real> cols;
        const real* colp;
        if (pointwise) {
            colp = x->value.data();
        } else {
            im2col(x->value, d, stride, pad, cols);
            colp = cols.data();
        }
        kern::kernels().gemm_nn_acc(w->value.data(), colp, out.data(), d.cout, kdim, hw);
        if (has_bias) {
            for (int co = 0; co < d.cout; ++co) {
                real* row = out.data() + static_cast<size_t>(co) * hw;
                const real b = bias->value[static_cast<size_t>(co)];
                for (int i = 0; i < hw; ++i) row[i] += b;
            }
        }
    }

    std::vector<Var> parents = {x, w};
    if (has_bias) parents.push_back(bias);
    Node* px = x.get();
    Node* pw = w.get();
    Node* pb = has_bias ? bias.get() : nullptr;

    return make_node(std::move(out), std::move(parents),
                     [px, pw, pb, d, stride, pad, hw, kdim, pointwise](Node& n) {
        const real* gy = n.grad.data();
        if (pb && pb->requires_grad) {
            real* gb = pb->ensure_grad().data();
            for (int co = 0; co < d.cout; ++co)
                gb[co] += kern::kernels().sum(gy + static_cast<size_t>(co) * hw,
                                              static_cast<size_t>(hw));
        }
        std::vector<real> cols;
        const real* colp = nullptr;
        if (pw->requires_grad || px->requires_grad) {
            if (pointwise) {
                colp = px->value.data();
            } else {
                im2col(px->value, d, stride, pad, cols);
                colp = cols.data();
            }
        }
        if (pw->requires_grad) {
            // dW[cout x kdim] += dY[cout x hw] * cols[kdim x hw]^T
            kern::kernels().gemm_nt_acc(gy, colp, pw->ensure_grad().data(), d.cout, hw, kdim);
        }
        if (px->requires_grad) {
            // dcols[kdim x hw] = W^T[kdim x cout] * dY[cout x hw]
            std::vector<real> wt(static_cast<size_t>(kdim) * d.cout);
            const real* wv = pw->value.data();
            for (int co = 0; co < d.cout; ++co)
                for (int kk = 0; kk < kdim; ++kk)
                    wt[static_cast<size_t>(kk) * d.cout + co] =
                        wv[static_cast<size_t>(co) * kdim + kk];
            if (pointwise) {
                kern::kernels().gemm_nn_acc(wt.data(), gy, px->ensure_grad().data(), kdim,
                                            d.cout, hw);
            } else {
                std::vector<real> dcols(static_cast<size_t>(kdim) * hw, real(0));
                kern::kernels().gemm_nn_acc(wt.data(), gy, dcols.data(), kdim, d.cout, hw);
                col2im_acc(dcols, d, stride, pad, px->ensure_grad());
            }
        }
    });
}

// ---- normalization ----------------------------------------------------------

Var instance_norm(const Var& x, const Var& gamma, const Var& beta, real eps) {
    if (x->value.rank() != 3) throw std::invalid_argument("instance_norm: input must be (C,H,W)");
    const int c = x->value.dim(0);
    const int hw = x->value.dim(1) * x->value.dim(2);
    if (gamma->value.size() != static_cast<size_t>(c) ||
        beta->value.size() != static_cast<size_t>(c))
        throw std::invalid_argument("instance_norm: affine parameter shape mismatch");

    Tensor out(x->value.shape());
    auto xhat = std::make_shared<Tensor>(x->value.shape());
    auto inv_std = std::make_shared<std::vector<real>>(static_cast<size_t>(c));
    const real* xv = x->value.data();
    for (int ch = 0; ch < c; ++ch) {
        const real* xc = xv + static_cast<size_t>(ch) * hw;
        real mean = kern::kernels().sum(xc, static_cast<size_t>(hw)) / hw;
        real var = 0;
        for (int i = 0; i < hw; ++i) {
            const real dv = xc[i] - mean;
            var += dv * dv;
        }
        var /= hw;
        const real inv = real(1) / std::sqrt(var + eps);
        (*inv_std)[static_cast<size_t>(ch)] = inv;
        const real g = gamma->value[static_cast<size_t>(ch)];
        const real b = beta->value[static_cast<size_t>(ch)];
        real* oc = out.data() + static_cast<size_t>(ch) * hw;
        real* hc = xhat->data() + static_cast<size_t>(ch) * hw;
        for (int i = 0; i < hw; ++i) {
            const real h = (xc[i] - mean) * inv;
            hc[i] = h;
            oc[i] = g * h + b;
        }
    }

    Node* px = x.get();
    Node* pg = gamma.get();
    Node* pbeta = beta.get();
    return make_node(std::move(out), {x, gamma, beta},
                     [px, pg, pbeta, xhat, inv_std, c, hw](Node& n) {
        const real* gy = n.grad.data();
        for (int ch = 0; ch < c; ++ch) {
            const real* gyc = gy + static_cast<size_t>(ch) * hw;
            const real* hc = xhat->data() + static_cast<size_t>(ch) * hw;
            real sum_gy = 0, sum_gy_h = 0;
            for (int i = 0; i < hw; ++i) {
                sum_gy += gyc[i];
                sum_gy_h += gyc[i] * hc[i];
            }
            if (pbeta->requires_grad) pbeta->ensure_grad()[static_cast<size_t>(ch)] += sum_gy;
            if (pg->requires_grad) pg->ensure_grad()[static_cast<size_t>(ch)] += sum_gy_h;
            if (px->requires_grad) {
                const real g = pg->value[static_cast<size_t>(ch)];
                const real inv = (*inv_std)[static_cast<size_t>(ch)];
                const real mean_g = g * sum_gy / hw;
                const real mean_gh = g * sum_gy_h / hw;
                real* gx = px->ensure_grad().data() + static_cast<size_t>(ch) * hw;
                for (int i = 0; i < hw; ++i)
                    gx[i] += inv * (g * gyc[i] - mean_g - hc[i] * mean_gh);
            }
        }
    });
}

// ---- structure --------------------------------------------------------------

Var concat_channels(const std::vector<Var>& xs) {
    if (xs.empty()) throw std::invalid_argument("concat_channels: empty input");
    const int h = xs[0]->value.dim(1);
    const int w = xs[0]->value.dim(2);
    int ctotal = 0;
    for (const auto& x : xs) {
        if (x->value.rank() != 3 || x->value.dim(1) != h || x->value.dim(2) != w)
            throw std::invalid_argument("concat_channels: spatial mismatch");
        ctotal += x->value.dim(0);
    }
    Tensor out({ctotal, h, w});
    size_t offset = 0;
    for (const auto& x : xs) {
        std::copy(x->value.data(), x->value.data() + x->value.size(), out.data() + offset);
        offset += x->value.size();
    }
    std::vector<Var> parents(xs.begin(), xs.end());
    return make_node(std::move(out), std::move(parents), [](Node& n) {
        size_t offset = 0;
        for (auto& p : n.parents) {
            if (p->requires_grad)
                kern::kernels().axpy(1, n.grad.data() + offset, p->ensure_grad().data(),
                                     p->value.size());
            offset += p->value.size();
        }
    });
}

Var upsample_bilinear(const Var& x, int out_h, int out_w) {
    if (x->value.rank() != 3) throw std::invalid_argument("upsample_bilinear: input must be (C,H,W)");
    const int c = x->value.dim(0);
    const int hi = x->value.dim(1);
    const int wi = x->value.dim(2);
    auto ay = std::make_shared<LerpAxis>(lerp_axis(hi, out_h));
    auto ax = std::make_shared<LerpAxis>(lerp_axis(wi, out_w));

    Tensor out({c, out_h, out_w});
    const real* xv = x->value.data();
    for (int ch = 0; ch < c; ++ch) {
        const real* xc = xv + static_cast<size_t>(ch) * hi * wi;
        real* oc = out.data() + static_cast<size_t>(ch) * out_h * out_w;
        for (int oy = 0; oy < out_h; ++oy) {
            const real fy = ay->f[oy];
            const real* r0 = xc + static_cast<size_t>(ay->i0[oy]) * wi;
            const real* r1 = xc + static_cast<size_t>(ay->i1[oy]) * wi;
            real* orow = oc + static_cast<size_t>(oy) * out_w;
            for (int ox = 0; ox < out_w; ++ox) {
                const real fx = ax->f[ox];
                const real v0 = r0[ax->i0[ox]] * (1 - fx) + r0[ax->i1[ox]] * fx;
                const real v1 = r1[ax->i0[ox]] * (1 - fx) + r1[ax->i1[ox]] * fx;
                orow[ox] = v0 * (1 - fy) + v1 * fy;
            }
        }
    }

    Node* px = x.get();
    return make_node(std::move(out), {x}, [px, ay, ax, c, hi, wi, out_h, out_w](Node& n) {
        real* gx = px->ensure_grad().data();
        const real* gy = n.grad.data();
        for (int ch = 0; ch < c; ++ch) {
            real* gc = gx + static_cast<size_t>(ch) * hi * wi;
            const real* oc = gy + static_cast<size_t>(ch) * out_h * out_w;
            for (int oy = 0; oy < out_h; ++oy) {
                const real fy = ay->f[oy];
                real* r0 = gc + static_cast<size_t>(ay->i0[oy]) * wi;
                real* r1 = gc + static_cast<size_t>(ay->i1[oy]) * wi;
                const real* orow = oc + static_cast<size_t>(oy) * out_w;
                for (int ox = 0; ox < out_w; ++ox) {
                    const real fx = ax->f[ox];
                    const real g = orow[ox];
                    r0[ax->i0[ox]] += g * (1 - fx) * (1 - fy);
                    r0[ax->i1[ox]] += g * fx * (1 - fy);
                    r1[ax->i0[ox]] += g * (1 - fx) * fy;
                    r1[ax->i1[ox]] += g * fx * fy;
                }
            }
        }
    });
}

// ---- pooling and broadcasts -------------------------------------------------

Var global_avg_pool(const Var& x) {
    const int c = x->value.dim(0);
    const int hw = x->value.dim(1) * x->value.dim(2);
    Tensor out({c, 1, 1});
    for (int ch = 0; ch < c; ++ch)
        out[static_cast<size_t>(ch)] =
            kern::kernels().sum(x->value.data() + static_cast<size_t>(ch) * hw,
                                static_cast<size_t>(hw)) / hw;
    Node* px = x.get();
    return make_node(std::move(out), {x}, [px, c, hw](Node& n) {
        real* gx = px->ensure_grad().data();
        for (int ch = 0; ch < c; ++ch) {
            const real g = n.grad[static_cast<size_t>(ch)] / hw;
            real* gc = gx + static_cast<size_t>(ch) * hw;
            for (int i = 0; i < hw; ++i) gc[i] += g;
        }
    });
}

Var global_max_pool(const Var& x) {
    const int c = x->value.dim(0);
    const int hw = x->value.dim(1) * x->value.dim(2);
    Tensor out({c, 1, 1});
    auto argmax = std::make_shared<std::vector<int>>(static_cast<size_t>(c));
    for (int ch = 0; ch < c; ++ch) {
        const real* xc = x->value.data() + static_cast<size_t>(ch) * hw;
        int best = 0;
        for (int i = 1; i < hw; ++i)
            if (xc[i] > xc[best]) best = i;
        (*argmax)[static_cast<size_t>(ch)] = best;
        out[static_cast<size_t>(ch)] = xc[best];
    }
    Node* px = x.get();
    return make_node(std::move(out), {x}, [px, argmax, c, hw](Node& n) {
        real* gx = px->ensure_grad().data();
        for (int ch = 0; ch < c; ++ch)
            gx[static_cast<size_t>(ch) * hw + (*argmax)[static_cast<size_t>(ch)]] +=
                n.grad[static_cast<size_t>(ch)];
    });
}

Var channel_mean(const Var& x) {
    const int c = x->value.dim(0);
    const int h = x->value.dim(1);
    const int w = x->value.dim(2);
    const int hw = h * w;
    Tensor out({1, h, w});
    for (int ch = 0; ch < c; ++ch)
        kern::kernels().axpy(real(1) / c, x->value.data() + static_cast<size_t>(ch) * hw,
                             out.data(), static_cast<size_t>(hw));
    Node* px = x.get();
    return make_node(std::move(out), {x}, [px, c, hw](Node& n) {
        real* gx = px->ensure_grad().data();
        for (int ch = 0; ch < c; ++ch)
            kern::kernels().axpy(real(1) / c, n.grad.data(), gx + static_cast<size_t>(ch) * hw,
                                 static_cast<size_t>(hw));
    });
}

Var channel_max(const Var& x) {
    const int c = x->value.dim(0);
    const int h = x->value.dim(1);
    const int w = x->value.dim(2);
    const int hw = h * w;
    Tensor out({1, h, w});
    auto argmax = std::make_shared<std::vector<int>>(static_cast<size_t>(hw));
    const real* xv = x->value.data();
    for (int i = 0; i < hw; ++i) {
        int best = 0;
        real bv = xv[i];
        for (int ch = 1; ch < c; ++ch) {
            const real v = xv[static_cast<size_t>(ch) * hw + i];
            if (v > bv) {
                bv = v;
                best = ch;
            }
        }
        (*argmax)[static_cast<size_t>(i)] = best;
        out[static_cast<size_t>(i)] = bv;
    }
    Node* px = x.get();
    return make_node(std::move(out), {x}, [px, argmax, hw](Node& n) {
        real* gx = px->ensure_grad().data();
        for (int i = 0; i < hw; ++i)
            gx[static_cast<size_t>((*argmax)[static_cast<size_t>(i)]) * hw + i] +=
                n.grad[static_cast<size_t>(i)];
    });
}

Var mul_channel(const Var& x, const Var& gate) {
    const int c = x->value.dim(0);
    const int hw = x->value.dim(1) * x->value.dim(2);
    if (gate->value.size() != static_cast<size_t>(c))
        throw std::invalid_argument("mul_channel: gate must have one value per channel");
    Tensor out(x->value.shape());
    for (int ch = 0; ch < c; ++ch)
        kern::kernels().scale(x->value.data() + static_cast<size_t>(ch) * hw,
                              gate->value[static_cast<size_t>(ch)],
                              out.data() + static_cast<size_t>(ch) * hw, static_cast<size_t>(hw));
    Node* px = x.get();
    Node* pg = gate.get();
    return make_node(std::move(out), {x, gate}, [px, pg, c, hw](Node& n) {
        for (int ch = 0; ch < c; ++ch) {
            const size_t off = static_cast<size_t>(ch) * hw;
            if (px->requires_grad)
                kern::kernels().axpy(pg->value[static_cast<size_t>(ch)], n.grad.data() + off,
                                     px->ensure_grad().data() + off, static_cast<size_t>(hw));
            if (pg->requires_grad)
                pg->ensure_grad()[static_cast<size_t>(ch)] +=
                    kern::kernels().dot(n.grad.data() + off, px->value.data() + off,
                                        static_cast<size_t>(hw));
        }
    });
}

Var mul_spatial(const Var& x, const Var& gate) {
    const int c = x->value.dim(0);
    const int hw = x->value.dim(1) * x->value.dim(2);
    if (gate->value.size() != static_cast<size_t>(hw))
        throw std::invalid_argument("mul_spatial: gate must have one value per pixel");
    Tensor out(x->value.shape());
    for (int ch = 0; ch < c; ++ch)
        kern::kernels().mul(x->value.data() + static_cast<size_t>(ch) * hw, gate->value.data(),
                            out.data() + static_cast<size_t>(ch) * hw, static_cast<size_t>(hw));
    Node* px = x.get();
    Node* pg = gate.get();
    return make_node(std::move(out), {x, gate}, [px, pg, c, hw](Node& n) {
        for (int ch = 0; ch < c; ++ch) {
            const size_t off = static_cast<size_t>(ch) * hw;
            if (px->requires_grad) {
                real* g = px->ensure_grad().data() + off;
                const real* gy = n.grad.data() + off;
                const real* s = pg->value.data();
                for (int i = 0; i < hw; ++i) g[i] += gy[i] * s[i];
            }
            if (pg->requires_grad) {
                real* gs = pg->ensure_grad().data();
                const real* gy = n.grad.data() + off;
                const real* xv = px->value.data() + off;
                for (int i = 0; i < hw; ++i) gs[i] += gy[i] * xv[i];
            }
        }
    });
}

// ---- reductions ---------------------------------------------------------------

Var sum_all(const Var& x) {
    Tensor out = Tensor::scalar(kern::kernels().sum(x->value.data(), x->value.size()));
    Node* px = x.get();
    return make_node(std::move(out), {x}, [px](Node& n) {
        const real g = n.grad[0];
        real* gx = px->ensure_grad().data();
        for (size_t i = 0; i < px->value.size(); ++i) gx[i] += g;
    });
}

Var mean_all(const Var& x) { return scale(sum_all(x), real(1) / static_cast<real>(x->value.size())); }

// ---- fused segmentation losses --------------------------------------------------

Var weighted_bce_logits(const Var& logits, const Tensor& target, const Tensor& weights,
                        BceNormalize normalize) {
    require_same_shape(logits->value, target, "weighted_bce");
    require_same_shape(logits->value, weights, "weighted_bce");
    check_binary_target(target, "weighted_bce");

    const size_t n = target.size();
    real denom = 0;
    if (normalize == BceNormalize::weight_sum) {
        for (size_t i = 0; i < n; ++i) denom += weights[i];
        if (denom <= 0) throw std::invalid_argument("weighted_bce: weight sum must be positive");
    } else {
        denom = static_cast<real>(n);
    }

    real acc = 0;
    const real* z = logits->value.data();
    for (size_t i = 0; i < n; ++i) acc += weights[i] * logit_bce(z[i], target[i]);

    auto tgt = std::make_shared<Tensor>(target);
    auto wts = std::make_shared<Tensor>(weights);
    Node* pl = logits.get();
    return make_node(Tensor::scalar(acc / denom), {logits}, [pl, tgt, wts, denom](Node& n) {
        const real g = n.grad[0] / denom;
        real* gz = pl->ensure_grad().data();
        const real* z = pl->value.data();
        for (size_t i = 0; i < tgt->size(); ++i)
            gz[i] += g * (*wts)[i] * (stable_sigmoid(z[i]) - (*tgt)[i]);
    });
}

Var weighted_iou_logits(const Var& logits, const Tensor& target, const Tensor& weights) {
    require_same_shape(logits->value, target, "weighted_iou");
    require_same_shape(logits->value, weights, "weighted_iou");
    check_binary_target(target, "weighted_iou");

    const size_t n = target.size();
    const real* z = logits->value.data();
    real inter = 0, uni = 0;
    std::vector<real> probs(n);
    for (size_t i = 0; i < n; ++i) {
        const real p = stable_sigmoid(z[i]);
        probs[i] = p;
        inter += weights[i] * p * target[i];
        uni += weights[i] * (p + target[i]);
    }
    uni -= inter;
    const real loss = real(1) - (inter + 1) / (uni + 1);

    auto tgt = std::make_shared<Tensor>(target);
    auto wts = std::make_shared<Tensor>(weights);
    auto pcache = std::make_shared<std::vector<real>>(std::move(probs));
    Node* pl = logits.get();
    return make_node(Tensor::scalar(loss), {logits},
                     [pl, tgt, wts, pcache, inter, uni](Node& n) {
        const real g = n.grad[0];
        const real u1 = uni + 1;
        const real i1 = inter + 1;
        real* gz = pl->ensure_grad().data();
        for (size_t i = 0; i < tgt->size(); ++i) {
            const real w = (*wts)[i];
            const real y = (*tgt)[i];
            const real p = (*pcache)[i];
            // d(inter)/dp = w*y ; d(union)/dp = w*(1-y)
            const real dldp = -(w * y * u1 - i1 * w * (1 - y)) / (u1 * u1);
            gz[i] += g * dldp * p * (1 - p);
        }
    });
}

}  // namespace swnet::ad
