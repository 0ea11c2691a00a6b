#pragma once

#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrd {

/// Thrown when tensor shapes are incompatible with an operation.
class ShapeError : public std::runtime_error {
public:
    explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown on non-finite inputs or numerical breakdown.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown on invalid user-facing configuration (ranks, CLI options, file contents).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Dense row-major tensor of doubles. Rank 2 doubles as the matrix type
/// (shape {rows, cols}) used by the linear-algebra kernels.
class DenseTensor {
public:
    DenseTensor() = default;

    explicit DenseTensor(std::vector<std::size_t> shape, double fill = 0.0)
        : shape_(std::move(shape)), data_(count(shape_), fill) {
        check_shape(shape_);
    }

    DenseTensor(std::vector<std::size_t> shape, std::vector<double> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        check_shape(shape_);
        if (count(shape_) != data_.size())
            throw ShapeError("DenseTensor: shape/product mismatch with data length");
    }

    static DenseTensor matrix(std::size_t rows, std::size_t cols, double fill = 0.0) {
        return DenseTensor({rows, cols}, fill);
    }

    static DenseTensor identity(std::size_t n) {
        DenseTensor m({n, n});
        for (std::size_t i = 0; i < n; ++i) m.data_[i * n + i] = 1.0;
        return m;
    }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    std::size_t dim(std::size_t i) const { return shape_.at(i); }

    std::size_t rows() const { require_rank(2); return shape_[0]; }
    std::size_t cols() const { require_rank(2); return shape_[1]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    double& operator[](std::size_t flat) { return data_[flat]; }
    double operator[](std::size_t flat) const { return data_[flat]; }

    double& operator()(std::size_t i) { return data_[i]; }
    double operator()(std::size_t i) const { return data_[i]; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }

    double& operator()(std::size_t i, std::size_t j, std::size_t k) {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }
    double operator()(std::size_t i, std::size_t j, std::size_t k) const {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }

    double& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
        return data_[((i * shape_[1] + j) * shape_[2] + k) * shape_[3] + l];
    }
    double operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
        return data_[((i * shape_[1] + j) * shape_[2] + k) * shape_[3] + l];
    }

    /// Same data, new shape (product must match).
    DenseTensor reshaped(std::vector<std::size_t> new_shape) const {
        if (count(new_shape) != data_.size())
            throw ShapeError("reshape: element count mismatch");
        DenseTensor out;
        out.shape_ = std::move(new_shape);
        out.data_ = data_;
        return out;
    }

    bool same_shape(const DenseTensor& other) const { return shape_ == other.shape_; }

    static std::size_t count(const std::vector<std::size_t>& shape) {
        return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                               std::multiplies<std::size_t>());
    }

private:
    void require_rank(std::size_t r) const {
        if (shape_.size() != r)
            throw ShapeError("DenseTensor: expected rank " + std::to_string(r) +
                             ", got " + std::to_string(shape_.size()));
    }
    static void check_shape(const std::vector<std::size_t>& shape) {
        for (std::size_t d : shape)
            if (d == 0) throw ShapeError("DenseTensor: zero-length dimension");
    }

    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

inline std::string shape_str(const std::vector<std::size_t>& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s[i]);
    }
    return out + "]";
}

}  // namespace lrd
