#include "swnet/tensor.hpp"

#include <stdexcept>

namespace swnet {

size_t Tensor::count(const std::vector<int>& shape) {
    size_t n = 1;
    for (int d : shape) {
        if (d < 0) throw std::invalid_argument("tensor dimension must be nonnegative");
        n *= static_cast<size_t>(d);
    }
    return n;
}

Tensor Tensor::from_vector(std::vector<int> shape, std::vector<real> values) {
    if (count(shape) != values.size())
        throw std::invalid_argument("from_vector: value count does not match shape");
    Tensor t;
    t.shape_ = std::move(shape);
    t.data_ = std::move(values);
    return t;
}

std::string Tensor::shape_str() const {
    std::string s;
    for (size_t i = 0; i < shape_.size(); ++i) {
        if (i) s += 'x';
        s += std::to_string(shape_[i]);
    }
    return s.empty() ? "scalar" : s;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(what) + ": shape mismatch " + a.shape_str() +
                                    " vs " + b.shape_str());
}

}  // namespace swnet
