#include "lrd/decompose.hpp"

#include <cmath>

#include "lrd/unfold.hpp"

namespace lrd {

namespace {

void check_rank(int r, int hi, const char* what) {
    if (r < 1 || r > hi)
        throw ValidationError(std::string(what) + " rank " + std::to_string(r) +
                              " outside [1, " + std::to_string(hi) + "]");
}

}  // namespace

FactorizedLayer decompose_fc(const LayerSpec& layer, int r, std::string origin,
                             SigmaPlacement placement) {
    layer.validate();
    if (layer.kind == LayerKind::Conv)
        throw ValidationError("decompose_fc: use decompose_conv_tucker2 for k x k layers");
    const int c = layer.in_channels, s = layer.out_channels;
    check_rank(r, std::min(c, s), "svd");
    const auto ur = static_cast<std::size_t>(r);

    SvdResult t = truncated_svd(layer.weight, ur);

    DenseTensor w0 = t.U;  // {C, r}, orthonormal columns
    DenseTensor w1({ur, static_cast<std::size_t>(s)});
    for (std::size_t i = 0; i < ur; ++i)
        for (std::size_t j = 0; j < static_cast<std::size_t>(s); ++j)
            w1(i, j) = t.sigma[i] * t.Vt(i, j);
    if (placement == SigmaPlacement::SplitSqrt) {
        for (std::size_t i = 0; i < ur; ++i) {
            const double sq = std::sqrt(t.sigma[i]);
            const double scale0 = sq;
            const double scale1 = t.sigma[i] > 0.0 ? sq / t.sigma[i] : 0.0;
            for (std::size_t row = 0; row < w0.rows(); ++row) w0(row, i) *= scale0;
            for (std::size_t j = 0; j < w1.cols(); ++j) w1(i, j) *= scale1;
        }
    }

    FactorizedLayer f;
    f.kind = FactorizedKind::SvdPair;
    f.ranks = {r};
    f.origin = std::move(origin);
    if (layer.kind == LayerKind::FullyConnected) {
        f.sublayers.push_back(LayerSpec::fully_connected(c, r, std::move(w0)));
        f.sublayers.push_back(LayerSpec::fully_connected(r, s, std::move(w1), layer.bias));
    } else {
        f.sublayers.push_back(LayerSpec::pointwise(c, r, std::move(w0)));
        f.sublayers.push_back(LayerSpec::pointwise(r, s, std::move(w1), layer.bias));
    }
    f.validate();
    return f;
}

TuckerDecomposer::TuckerDecomposer(const LayerSpec& layer, std::string origin)
    : layer_(layer), origin_(std::move(origin)) {
    layer_.validate();
    if (layer_.kind != LayerKind::Conv)
        throw ValidationError("tucker decomposition applies to k x k conv layers");
    const auto c = static_cast<std::size_t>(layer_.in_channels);
    const auto s = static_cast<std::size_t>(layer_.out_channels);
    const auto k2 = static_cast<std::size_t>(layer_.kernel_h * layer_.kernel_w);

    // {C,S,k^2} view; spatial dims flattened row-major (h then w).
    const DenseTensor w3 = layer_.weight.reshaped({c, s, k2});
    // Completed to square so any rank up to the channel count is available.
    u_full_ = complete_basis(svd(mode_n_unfold(w3, 0)).U);  // {C, C}
    v_full_ = complete_basis(svd(mode_n_unfold(w3, 1)).U);  // {S, S}

    // Rotated core at full ranks; any truncated core is a leading slice.
    DenseTensor tmp = mode_n_multiply(w3, transpose(u_full_), 0);
    core_full_ = mode_n_multiply(tmp, transpose(v_full_), 1);
}

FactorizedLayer TuckerDecomposer::factorize(int r1, int r2) const {
    const int c = layer_.in_channels, s = layer_.out_channels;
    check_rank(r1, c, "tucker mode-1");
    check_rank(r2, s, "tucker mode-2");
    const auto ur1 = static_cast<std::size_t>(r1);
    const auto ur2 = static_cast<std::size_t>(r2);
    const auto kh = static_cast<std::size_t>(layer_.kernel_h);
    const auto kw = static_cast<std::size_t>(layer_.kernel_w);

    DenseTensor w0({static_cast<std::size_t>(c), ur1});
    for (std::size_t i = 0; i < w0.rows(); ++i)
        for (std::size_t j = 0; j < ur1; ++j) w0(i, j) = u_full_(i, j);

    DenseTensor core({ur1, ur2, kh, kw});
    for (std::size_t a = 0; a < ur1; ++a)
        for (std::size_t b = 0; b < ur2; ++b)
            for (std::size_t q = 0; q < kh * kw; ++q)
                core[(a * ur2 + b) * kh * kw + q] = core_full_(a, b, q);

    DenseTensor w2({ur2, static_cast<std::size_t>(s)});
    for (std::size_t i = 0; i < static_cast<std::size_t>(s); ++i)
        for (std::size_t j = 0; j < ur2; ++j) w2(j, i) = v_full_(i, j);

    FactorizedLayer f;
    f.kind = FactorizedKind::TuckerTriple;
    f.ranks = {r1, r2};
    f.origin = origin_;
    f.sublayers.push_back(LayerSpec::pointwise(c, r1, std::move(w0)));
    f.sublayers.push_back(LayerSpec::conv(r1, r2, layer_.kernel_h, std::move(core),
                                          std::nullopt, layer_.padding));
    f.sublayers.push_back(LayerSpec::pointwise(r2, s, std::move(w2), layer_.bias));
    f.validate();
    return f;
}

FactorizedLayer decompose_conv_tucker2(const LayerSpec& layer, int r1, int r2,
                                       std::string origin) {
    return TuckerDecomposer(layer, std::move(origin)).factorize(r1, r2);
}

DenseTensor reconstruct(const FactorizedLayer& f) {
    f.validate();
    if (f.kind == FactorizedKind::SvdPair)
        return matmul(f.sublayers[0].weight, f.sublayers[1].weight);

    const LayerSpec& mid = f.sublayers[1];
    const auto r1 = static_cast<std::size_t>(mid.in_channels);
    const auto r2 = static_cast<std::size_t>(mid.out_channels);
    const auto k2 = static_cast<std::size_t>(mid.kernel_h * mid.kernel_w);
    const DenseTensor core = mid.weight.reshaped({r1, r2, k2});
    DenseTensor up = mode_n_multiply(core, f.sublayers[0].weight, 0);  // {C,r2,k2}
    DenseTensor full = mode_n_multiply(up, transpose(f.sublayers[2].weight), 1);
    const auto c = static_cast<std::size_t>(f.in_channels());
    const auto s = static_cast<std::size_t>(f.out_channels());
    return full.reshaped({c, s, static_cast<std::size_t>(mid.kernel_h),
                          static_cast<std::size_t>(mid.kernel_w)});
}

}  // namespace lrd
