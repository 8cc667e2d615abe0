#pragma once

#include <cassert>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace swnet {

/// All numeric work runs in double precision; the gradient checker and the
/// metric oracles need more headroom than float32 provides.
using real = double;

/// Dense row-major tensor. Rank is dynamic; feature maps use (C, H, W),
/// masks and score maps use (H, W). Copies are deep, moves are cheap.
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<int> shape)
        : shape_(std::move(shape)), data_(count(shape_), real(0)) {}

    Tensor(std::initializer_list<int> shape, real fill = real(0))
        : shape_(shape), data_(count(shape_), fill) {}

    static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }

    static Tensor full(std::vector<int> shape, real value) {
        Tensor t(std::move(shape));
        for (auto& v : t.data_) v = value;
        return t;
    }

    static Tensor scalar(real value) {
        Tensor t({1});
        t.data_[0] = value;
        return t;
    }

    static Tensor from_vector(std::vector<int> shape, std::vector<real> values);

    const std::vector<int>& shape() const { return shape_; }
    int rank() const { return static_cast<int>(shape_.size()); }
    int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
    size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    real* data() { return data_.data(); }
    const real* data() const { return data_.data(); }

    real& operator[](size_t i) { return data_[i]; }
    real operator[](size_t i) const { return data_[i]; }

    // (h, w) access on rank-2 tensors
    real& at(int h, int w) {
        assert(rank() == 2);
        return data_[static_cast<size_t>(h) * shape_[1] + w];
    }
    real at(int h, int w) const {
        assert(rank() == 2);
        return data_[static_cast<size_t>(h) * shape_[1] + w];
    }

    // (c, h, w) access on rank-3 tensors
    real& at(int c, int h, int w) {
        assert(rank() == 3);
        return data_[(static_cast<size_t>(c) * shape_[1] + h) * shape_[2] + w];
    }
    real at(int c, int h, int w) const {
        assert(rank() == 3);
        return data_[(static_cast<size_t>(c) * shape_[1] + h) * shape_[2] + w];
    }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    /// "CxHxW" style rendering for error messages.
    std::string shape_str() const;

    static size_t count(const std::vector<int>& shape);

private:
    std::vector<int> shape_;
    std::vector<real> data_;
};

/// Throws std::invalid_argument when the two shapes differ; `what` names the
/// operation for the message.
void require_same_shape(const Tensor& a, const Tensor& b, const char* what);

}  // namespace swnet
