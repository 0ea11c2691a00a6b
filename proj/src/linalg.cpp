#include "lrd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lrd {

DenseTensor matmul(const DenseTensor& a, const DenseTensor& b) {
    if (a.rank() != 2 || b.rank() != 2)
        throw ShapeError("matmul: both operands must be rank-2");
    if (a.cols() != b.rows())
        throw ShapeError("matmul: inner dimensions disagree: " + shape_str(a.shape()) +
                         " x " + shape_str(b.shape()));
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    DenseTensor c({m, n});
    const double* pa = a.data();
    const double* pb = b.data();
    double* pc = c.data();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t l = 0; l < k; ++l) {
            const double av = pa[i * k + l];
            if (av == 0.0) continue;
            const double* brow = pb + l * n;
            double* crow = pc + i * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
    return c;
}

DenseTensor transpose(const DenseTensor& m) {
    if (m.rank() != 2) throw ShapeError("transpose: rank-2 expected");
    DenseTensor t({m.cols(), m.rows()});
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
    return t;
}

double frobenius_norm(const DenseTensor& t) {
    double acc = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) acc += t[i] * t[i];
    return std::sqrt(acc);
}

double reconstruction_error(const DenseTensor& w, const DenseTensor& approx) {
    if (!w.same_shape(approx))
        throw ShapeError("reconstruction_error: shape mismatch " + shape_str(w.shape()) +
                         " vs " + shape_str(approx.shape()));
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double d = w[i] - approx[i];
        acc += d * d;
    }
    return acc;
}

namespace detail {

void householder_qr(const DenseTensor& a, DenseTensor& q, DenseTensor& r) {
    const std::size_t m = a.rows(), n = a.cols();
    if (m < n) throw ShapeError("householder_qr: requires m >= n");

    // Column-major working copy; reflectors overwrite the lower triangle.
    std::vector<double> w(m * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) w[j * m + i] = a(i, j);
    std::vector<double> tau(n, 0.0);

    for (std::size_t j = 0; j < n; ++j) {
        double* col = w.data() + j * m;
        double norm = 0.0;
        for (std::size_t i = j; i < m; ++i) norm += col[i] * col[i];
        norm = std::sqrt(norm);
        if (norm == 0.0) { tau[j] = 0.0; continue; }
        const double alpha = col[j] >= 0.0 ? -norm : norm;
        const double v0 = col[j] - alpha;
        tau[j] = -v0 / alpha;  // 2 / ||v||^2 with v scaled so v[j] == 1
        const double inv_v0 = 1.0 / v0;
        for (std::size_t i = j + 1; i < m; ++i) col[i] *= inv_v0;
        col[j] = alpha;
        for (std::size_t jj = j + 1; jj < n; ++jj) {
            double* c = w.data() + jj * m;
            double dot = c[j];
            for (std::size_t i = j + 1; i < m; ++i) dot += col[i] * c[i];
            dot *= tau[j];
            c[j] -= dot;
            for (std::size_t i = j + 1; i < m; ++i) c[i] -= dot * col[i];
        }
    }

    r = DenseTensor({n, n});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) r(i, j) = w[j * m + i];

    // Thin Q: apply reflectors in reverse to the first n columns of I.
    std::vector<double> qc(m * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) qc[j * m + j] = 1.0;
    for (std::size_t j = n; j-- > 0;) {
        if (tau[j] == 0.0) continue;
        const double* v = w.data() + j * m;
        for (std::size_t jj = j; jj < n; ++jj) {
            double* c = qc.data() + jj * m;
            double dot = c[j];
            for (std::size_t i = j + 1; i < m; ++i) dot += v[i] * c[i];
            dot *= tau[j];
            c[j] -= dot;
            for (std::size_t i = j + 1; i < m; ++i) c[i] -= dot * v[i];
        }
    }
    q = DenseTensor({m, n});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) q(i, j) = qc[j * m + i];
}

namespace {

constexpr double kJacobiTol = 1.0e-15;
constexpr int kMaxSweeps = 60;
constexpr double kSigmaClampRel = 1.0e-12;

/// One-sided Jacobi on a tall matrix held column-major. On return `cols`
/// holds U * diag(sigma) and `v` (n x n column-major) the right singular
/// vectors as columns.
void jacobi_sweeps(std::vector<double>& cols, std::vector<double>& v, std::size_t m,
                   std::size_t n) {
    v.assign(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) v[j * n + j] = 1.0;

    std::vector<double> sq(n, 0.0);
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            const double* c = cols.data() + j * m;
            for (std::size_t i = 0; i < m; ++i) s += c[i] * c[i];
            sq[j] = s;
        }
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double* cp = cols.data() + p * m;
                double* cq = cols.data() + q * m;
                double apq = 0.0;
                for (std::size_t i = 0; i < m; ++i) apq += cp[i] * cq[i];
                const double app = sq[p], aqq = sq[q];
                if (app == 0.0 || aqq == 0.0) continue;
                if (std::abs(apq) <= kJacobiTol * std::sqrt(app * aqq)) continue;
                rotated = true;
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double xp = cp[i], xq = cq[i];
                    cp[i] = c * xp - s * xq;
                    cq[i] = s * xp + c * xq;
                }
                double* vp = v.data() + p * n;
                double* vq = v.data() + q * n;
                for (std::size_t i = 0; i < n; ++i) {
                    const double xp = vp[i], xq = vq[i];
                    vp[i] = c * xp - s * xq;
                    vq[i] = s * xp + c * xq;
                }
                sq[p] = c * c * app - 2.0 * c * s * apq + s * s * aqq;
                sq[q] = s * s * app + 2.0 * c * s * apq + c * c * aqq;
            }
        }
        if (!rotated) break;
    }
}

/// SVD of a tall (m >= n) matrix via one-sided Jacobi, with orthonormal
/// completion of null-space columns and the deterministic sign convention.
SvdResult svd_tall(const DenseTensor& a) {
    const std::size_t m = a.rows(), n = a.cols();
    std::vector<double> cols(m * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) cols[j * m + i] = a(i, j);

    std::vector<double> v;
    jacobi_sweeps(cols, v, m, n);

    std::vector<double> sig(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        const double* c = cols.data() + j * m;
        for (std::size_t i = 0; i < m; ++i) s += c[i] * c[i];
        sig[j] = std::sqrt(s);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return sig[x] > sig[y]; });

    const double sigma_max = sig[order[0]];
    const double clamp = kSigmaClampRel * sigma_max;

    SvdResult out;
    out.U = DenseTensor({m, n});
    out.Vt = DenseTensor({n, n});
    out.sigma.resize(n);

    std::vector<std::size_t> degenerate;
    for (std::size_t jj = 0; jj < n; ++jj) {
        const std::size_t j = order[jj];
        double s = sig[j];
        if (s <= clamp) {
            s = 0.0;
            degenerate.push_back(jj);
        }
        out.sigma[jj] = s;
        if (s > 0.0) {
            const double inv = 1.0 / sig[j];
            for (std::size_t i = 0; i < m; ++i) out.U(i, jj) = cols[j * m + i] * inv;
        }
        for (std::size_t i = 0; i < n; ++i) out.Vt(jj, i) = v[j * n + i];
    }

    // Null-space columns of U: complete with canonical basis vectors,
    // projected against all existing columns, largest residual first.
    for (std::size_t jj : degenerate) {
        std::size_t best_k = 0;
        double best_norm2 = -1.0;
        std::vector<double> best;
        for (std::size_t k = 0; k < m; ++k) {
            std::vector<double> w(m, 0.0);
            w[k] = 1.0;
            for (std::size_t c = 0; c < n; ++c) {
                if (c == jj) continue;
                if (out.sigma[c] == 0.0 && c > jj) continue;  // not yet filled
                const double dot = out.U(k, c);  // <e_k, u_c>
                for (std::size_t i = 0; i < m; ++i) w[i] -= dot * out.U(i, c);
            }
            double norm2 = 0.0;
            for (double x : w) norm2 += x * x;
            if (norm2 > best_norm2) {
                best_norm2 = norm2;
                best_k = k;
                best = std::move(w);
            }
        }
        (void)best_k;
        const double inv = 1.0 / std::sqrt(best_norm2);
        for (std::size_t i = 0; i < m; ++i) out.U(i, jj) = best[i] * inv;
    }

    // Sign convention: first entry of each left vector with magnitude above
    // 1e-12 of the column max is made non-negative.
    for (std::size_t j = 0; j < n; ++j) {
        double cmax = 0.0;
        for (std::size_t i = 0; i < m; ++i) cmax = std::max(cmax, std::abs(out.U(i, j)));
        double pivot = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (std::abs(out.U(i, j)) > 1e-12 * cmax) {
                pivot = out.U(i, j);
                break;
            }
        }
        if (pivot < 0.0) {
            for (std::size_t i = 0; i < m; ++i) out.U(i, j) = -out.U(i, j);
            for (std::size_t i = 0; i < n; ++i) out.Vt(j, i) = -out.Vt(j, i);
        }
    }
    return out;
}

}  // namespace
}  // namespace detail

SvdResult svd(const DenseTensor& a) {
    if (a.rank() != 2) throw ShapeError("svd: rank-2 expected");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!std::isfinite(a[i])) throw NumericError("svd: non-finite input entry");

    const std::size_t m = a.rows(), n = a.cols();
    if (m < n) {
        SvdResult t = svd(transpose(a));
        SvdResult out;
        out.sigma = std::move(t.sigma);
        out.U = transpose(t.Vt);
        out.Vt = transpose(t.U);
        // Re-apply the sign convention to the new left factor.
        const std::size_t p = out.sigma.size();
        for (std::size_t j = 0; j < p; ++j) {
            double cmax = 0.0;
            for (std::size_t i = 0; i < m; ++i) cmax = std::max(cmax, std::abs(out.U(i, j)));
            double pivot = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                if (std::abs(out.U(i, j)) > 1e-12 * cmax) {
                    pivot = out.U(i, j);
                    break;
                }
            }
            if (pivot < 0.0) {
                for (std::size_t i = 0; i < m; ++i) out.U(i, j) = -out.U(i, j);
                for (std::size_t i = 0; i < n; ++i) out.Vt(j, i) = -out.Vt(j, i);
            }
        }
        return out;
    }

    // QR preprocessing pays once the aspect ratio is significant.
    if (m > 2 * n && n > 1) {
        DenseTensor q, r;
        detail::householder_qr(a, q, r);
        SvdResult s = detail::svd_tall(r);
        SvdResult out;
        out.sigma = std::move(s.sigma);
        out.Vt = std::move(s.Vt);
        out.U = matmul(q, s.U);
        return out;
    }
    return detail::svd_tall(a);
}

SvdResult truncated_svd(const DenseTensor& m, std::size_t r) {
    if (m.rank() != 2) throw ShapeError("truncated_svd: rank-2 expected");
    const std::size_t p = std::min(m.rows(), m.cols());
    if (r < 1 || r > p)
        throw ValidationError("truncated_svd: rank " + std::to_string(r) +
                              " outside [1, " + std::to_string(p) + "]");
    SvdResult full = svd(m);
    SvdResult out;
    out.sigma.assign(full.sigma.begin(), full.sigma.begin() + r);
    out.U = DenseTensor({m.rows(), r});
    out.Vt = DenseTensor({r, m.cols()});
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < r; ++j) out.U(i, j) = full.U(i, j);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out.Vt(i, j) = full.Vt(i, j);
    return out;
}

DenseTensor svd_reconstruct(const SvdResult& s) {
    const std::size_t m = s.U.rows(), p = s.sigma.size(), n = s.Vt.cols();
    DenseTensor us({m, p});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < p; ++j) us(i, j) = s.U(i, j) * s.sigma[j];
    return matmul(us, s.Vt);
}

DenseTensor complete_basis(const DenseTensor& u) {
    const std::size_t m = u.rows(), p = u.cols();
    if (p > m) throw ShapeError("complete_basis: more columns than rows");
    DenseTensor out({m, m});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < p; ++j) out(i, j) = u(i, j);
    for (std::size_t jj = p; jj < m; ++jj) {
        std::vector<double> best;
        double best_norm2 = -1.0;
        for (std::size_t k = 0; k < m; ++k) {
            std::vector<double> w(m, 0.0);
            w[k] = 1.0;
            for (std::size_t c = 0; c < jj; ++c) {
                const double dot = out(k, c);
                for (std::size_t i = 0; i < m; ++i) w[i] -= dot * out(i, c);
            }
            double norm2 = 0.0;
            for (double x : w) norm2 += x * x;
            if (norm2 > best_norm2) {
                best_norm2 = norm2;
                best = std::move(w);
            }
        }
        const double inv = 1.0 / std::sqrt(best_norm2);
        for (std::size_t i = 0; i < m; ++i) out(i, jj) = best[i] * inv;
    }
    return out;
}

}  // namespace lrd
