#pragma once

#include "lrd/linalg.hpp"
#include "lrd/tensor.hpp"

namespace lrd {

/// Mode-n unfolding: rows follow dimension n, columns flatten the remaining
/// dimensions in row-major order (mode order preserved, n skipped). Result
/// is dim(n) x (size / dim(n)).
DenseTensor mode_n_unfold(const DenseTensor& t, std::size_t mode);

/// Inverse of mode_n_unfold for the given target shape. Round-trips bit-exactly.
DenseTensor mode_n_fold(const DenseTensor& m, const std::vector<std::size_t>& shape,
                        std::size_t mode);

/// Multilinear product along mode n: replaces dimension n of `t` by the row
/// count of `m` (m is p x dim(n)). Equivalent to fold(m * unfold(t, n)).
DenseTensor mode_n_multiply(const DenseTensor& t, const DenseTensor& m, std::size_t mode);

}  // namespace lrd
