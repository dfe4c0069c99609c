#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "nlos/common.hpp"

namespace nlos {

// Dense row-major N-d array. Single precision carries training; double
// precision is used by the gradient-check suites.
template <typename T>
class Tensor {
  public:
    Tensor() = default;

    explicit Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
        std::int64_t n = 1;
        for (int d : shape_) {
            if (d <= 0) throw ShapeError("Tensor: non-positive dimension");
            n *= d;
        }
        data_.assign(static_cast<size_t>(n), T(0));
    }

    const std::vector<int>& shape() const { return shape_; }
    int rank() const { return static_cast<int>(shape_.size()); }
    int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
    std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }
    bool empty() const { return data_.empty(); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    T& operator[](std::int64_t i) { return data_[static_cast<size_t>(i)]; }
    T operator[](std::int64_t i) const { return data_[static_cast<size_t>(i)]; }

    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

    // Same storage, new dims; element count must match.
    Tensor reshaped(std::vector<int> shape) const {
        Tensor out;
        std::int64_t n = 1;
        for (int d : shape) n *= d;
        if (n != size()) throw ShapeError("Tensor: reshape element count mismatch");
        out.shape_ = std::move(shape);
        out.data_ = data_;
        return out;
    }

    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

    std::string shape_string() const {
        std::string s = "[";
        for (size_t i = 0; i < shape_.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(shape_[i]);
        }
        return s + "]";
    }

  private:
    std::vector<int> shape_;
    std::vector<T> data_;
};

template <typename T>
void check_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* what) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(what) + ": shape mismatch " + a.shape_string() +
                         " vs " + b.shape_string());
    }
}

} // namespace nlos
