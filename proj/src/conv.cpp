#include "lrd/conv.hpp"

#include "lrd/linalg.hpp"

namespace lrd {

namespace {

std::size_t out_extent(std::size_t in, std::size_t k, int padding) {
    const long long v = static_cast<long long>(in) + 2LL * padding -
                        static_cast<long long>(k) + 1LL;
    if (v <= 0)
        throw ShapeError("conv2d: kernel larger than padded input");
    return static_cast<std::size_t>(v);
}

}  // namespace

DenseTensor im2col(const double* sample, std::size_t c, std::size_t h, std::size_t w,
                   std::size_t kh, std::size_t kw, int padding) {
    const std::size_t oh = out_extent(h, kh, padding);
    const std::size_t ow = out_extent(w, kw, padding);
    DenseTensor cols({c * kh * kw, oh * ow});
    double* dst = cols.data();
    for (std::size_t ch = 0; ch < c; ++ch) {
        const double* plane = sample + ch * h * w;
        for (std::size_t ki = 0; ki < kh; ++ki)
            for (std::size_t kj = 0; kj < kw; ++kj) {
                double* row = dst + ((ch * kh + ki) * kw + kj) * (oh * ow);
                for (std::size_t p = 0; p < oh; ++p) {
                    const long long src_i = static_cast<long long>(p + ki) - padding;
                    if (src_i < 0 || src_i >= static_cast<long long>(h)) continue;
                    for (std::size_t q = 0; q < ow; ++q) {
                        const long long src_j = static_cast<long long>(q + kj) - padding;
                        if (src_j < 0 || src_j >= static_cast<long long>(w)) continue;
                        row[p * ow + q] = plane[src_i * w + src_j];
                    }
                }
            }
    }
    return cols;
}

void col2im_add(const DenseTensor& cols, double* sample, std::size_t c, std::size_t h,
                std::size_t w, std::size_t kh, std::size_t kw, int padding) {
    const std::size_t oh = out_extent(h, kh, padding);
    const std::size_t ow = out_extent(w, kw, padding);
    if (cols.rows() != c * kh * kw || cols.cols() != oh * ow)
        throw ShapeError("col2im_add: patch matrix shape mismatch");
    const double* src = cols.data();
    for (std::size_t ch = 0; ch < c; ++ch) {
        double* plane = sample + ch * h * w;
        for (std::size_t ki = 0; ki < kh; ++ki)
            for (std::size_t kj = 0; kj < kw; ++kj) {
                const double* row = src + ((ch * kh + ki) * kw + kj) * (oh * ow);
                for (std::size_t p = 0; p < oh; ++p) {
                    const long long dst_i = static_cast<long long>(p + ki) - padding;
                    if (dst_i < 0 || dst_i >= static_cast<long long>(h)) continue;
                    for (std::size_t q = 0; q < ow; ++q) {
                        const long long dst_j = static_cast<long long>(q + kj) - padding;
                        if (dst_j < 0 || dst_j >= static_cast<long long>(w)) continue;
                        plane[dst_i * w + dst_j] += row[p * ow + q];
                    }
                }
            }
    }
}

DenseTensor conv2d(const DenseTensor& input, const DenseTensor& weight,
                   const std::optional<DenseTensor>& bias, int padding) {
    if (input.rank() != 4) throw ShapeError("conv2d: input must be {N,C,H,W}");
    if (weight.rank() != 4) throw ShapeError("conv2d: weight must be {S,C,h,w}");
    const std::size_t n = input.dim(0), c = input.dim(1), h = input.dim(2), w = input.dim(3);
    const std::size_t s = weight.dim(0), wc = weight.dim(1), kh = weight.dim(2),
                      kw = weight.dim(3);
    if (wc != c)
        throw ShapeError("conv2d: weight expects " + std::to_string(wc) +
                         " input channels, input has " + std::to_string(c));
    if (bias && bias->size() != s) throw ShapeError("conv2d: bias length mismatch");
    const std::size_t oh = out_extent(h, kh, padding);
    const std::size_t ow = out_extent(w, kw, padding);

    const DenseTensor wmat = weight.reshaped({s, c * kh * kw});
    DenseTensor out({n, s, oh, ow});
    for (std::size_t i = 0; i < n; ++i) {
        const DenseTensor cols = im2col(input.data() + i * c * h * w, c, h, w, kh, kw, padding);
        DenseTensor y = matmul(wmat, cols);  // {S, oh*ow}
        double* dst = out.data() + i * s * oh * ow;
        const double* src = y.data();
        for (std::size_t j = 0; j < s * oh * ow; ++j) dst[j] = src[j];
        if (bias) {
            for (std::size_t ss = 0; ss < s; ++ss) {
                const double b = (*bias)[ss];
                double* plane = dst + ss * oh * ow;
                for (std::size_t j = 0; j < oh * ow; ++j) plane[j] += b;
            }
        }
    }
    return out;
}

}  // namespace lrd
