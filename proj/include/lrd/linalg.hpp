#pragma once

#include "lrd/tensor.hpp"

namespace lrd {

/// Full or truncated singular value decomposition M = U * diag(sigma) * Vt.
/// U is m x p with orthonormal columns, sigma holds p non-negative values in
/// non-increasing order, Vt is p x n with orthonormal rows.
struct SvdResult {
    DenseTensor U;
    std::vector<double> sigma;
    DenseTensor Vt;

    std::size_t num_components() const { return sigma.size(); }
};

/// C = A * B. Throws ShapeError if inner dimensions disagree.
DenseTensor matmul(const DenseTensor& a, const DenseTensor& b);

DenseTensor transpose(const DenseTensor& m);

double frobenius_norm(const DenseTensor& t);

/// Squared Frobenius distance ||w - approx||^2. Shapes must match.
double reconstruction_error(const DenseTensor& w, const DenseTensor& approx);

/// Full SVD with p = min(m, n) components. One-sided Jacobi on the short
/// side, preceded by a Householder QR when the matrix is strongly
/// rectangular. Deterministic: singular values sorted non-increasing,
/// values below 1e-12 * sigma_max clamped to zero, and each left singular
/// vector's first non-negligible entry made non-negative.
SvdResult svd(const DenseTensor& m);

/// Leading r components of the full SVD. Throws ValidationError when r is
/// outside [1, min(m, n)].
SvdResult truncated_svd(const DenseTensor& m, std::size_t r);

/// U * diag(sigma) * Vt.
DenseTensor svd_reconstruct(const SvdResult& s);

/// Extends an m x p matrix with orthonormal columns (p <= m) to a full
/// m x m orthonormal basis; the first p columns are preserved.
DenseTensor complete_basis(const DenseTensor& u);

namespace detail {
/// Householder QR of a tall matrix (m >= n). Returns thin Q (m x n) and
/// square R (n x n). Exposed for tests.
void householder_qr(const DenseTensor& a, DenseTensor& q, DenseTensor& r);
}  // namespace detail

}  // namespace lrd
