#include "lrd/unfold.hpp"

namespace lrd {

namespace {

void check_mode(const DenseTensor& t, std::size_t mode) {
    if (mode >= t.rank())
        throw ShapeError("mode index " + std::to_string(mode) + " out of range for rank " +
                         std::to_string(t.rank()) + " tensor");
}

/// Strides of the flattened column index (all dims except `mode`, row-major).
struct UnfoldIndexer {
    std::size_t rows, cols;
    std::size_t outer, mid, inner;  // size products around the chosen mode

    UnfoldIndexer(const std::vector<std::size_t>& shape, std::size_t mode) {
        rows = shape[mode];
        outer = 1;
        for (std::size_t i = 0; i < mode; ++i) outer *= shape[i];
        inner = 1;
        for (std::size_t i = mode + 1; i < shape.size(); ++i) inner *= shape[i];
        mid = rows;
        cols = outer * inner;
    }
};

}  // namespace

DenseTensor mode_n_unfold(const DenseTensor& t, std::size_t mode) {
    check_mode(t, mode);
    UnfoldIndexer ix(t.shape(), mode);
    DenseTensor m({ix.rows, ix.cols});
    const double* src = t.data();
    double* dst = m.data();
    for (std::size_t o = 0; o < ix.outer; ++o)
        for (std::size_t r = 0; r < ix.rows; ++r) {
            const double* s = src + (o * ix.mid + r) * ix.inner;
            double* d = dst + r * ix.cols + o * ix.inner;
            for (std::size_t i = 0; i < ix.inner; ++i) d[i] = s[i];
        }
    return m;
}

DenseTensor mode_n_fold(const DenseTensor& m, const std::vector<std::size_t>& shape,
                        std::size_t mode) {
    if (m.rank() != 2) throw ShapeError("mode_n_fold: rank-2 expected");
    if (mode >= shape.size()) throw ShapeError("mode_n_fold: mode out of range");
    UnfoldIndexer ix(shape, mode);
    if (m.rows() != ix.rows || m.cols() != ix.cols)
        throw ShapeError("mode_n_fold: matrix " + shape_str(m.shape()) +
                         " incompatible with target " + shape_str(shape));
    DenseTensor t(shape);
    const double* src = m.data();
    double* dst = t.data();
    for (std::size_t o = 0; o < ix.outer; ++o)
        for (std::size_t r = 0; r < ix.rows; ++r) {
            const double* s = src + r * ix.cols + o * ix.inner;
            double* d = dst + (o * ix.mid + r) * ix.inner;
            for (std::size_t i = 0; i < ix.inner; ++i) d[i] = s[i];
        }
    return t;
}

DenseTensor mode_n_multiply(const DenseTensor& t, const DenseTensor& m, std::size_t mode) {
    check_mode(t, mode);
    if (m.rank() != 2 || m.cols() != t.dim(mode))
        throw ShapeError("mode_n_multiply: factor " + shape_str(m.shape()) +
                         " incompatible with mode " + std::to_string(mode) + " of " +
                         shape_str(t.shape()));
    DenseTensor prod = matmul(m, mode_n_unfold(t, mode));
    std::vector<std::size_t> shape = t.shape();
    shape[mode] = m.rows();
    return mode_n_fold(prod, shape, mode);
}

}  // namespace lrd
