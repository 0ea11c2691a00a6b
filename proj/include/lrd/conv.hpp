#pragma once

#include <optional>

#include "lrd/tensor.hpp"

namespace lrd {

/// 2-D cross-correlation, stride 1. input is {N,C,H,W}, weight {S,C,h,w}
/// (output channels leading), bias {S} if present. Output {N,S,H',W'} with
/// H' = H + 2*padding - h + 1. Implemented as im2col + matmul.
DenseTensor conv2d(const DenseTensor& input, const DenseTensor& weight,
                   const std::optional<DenseTensor>& bias, int padding);

/// Patch matrix of one sample: {C*h*w, H'*W'}, row index (c*h + i)*w + j.
DenseTensor im2col(const double* sample, std::size_t c, std::size_t h, std::size_t w,
                   std::size_t kh, std::size_t kw, int padding);

/// Scatter-add inverse of im2col, accumulating into a {C,H,W} sample buffer.
void col2im_add(const DenseTensor& cols, double* sample, std::size_t c, std::size_t h,
                std::size_t w, std::size_t kh, std::size_t kw, int padding);

}  // namespace lrd
