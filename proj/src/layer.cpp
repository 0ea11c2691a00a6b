#include "lrd/layer.hpp"

#include "lrd/conv.hpp"
#include "lrd/linalg.hpp"

namespace lrd {

const char* to_string(LayerKind k) {
    switch (k) {
        case LayerKind::FullyConnected: return "fc";
        case LayerKind::PointwiseConv: return "pointwise";
        case LayerKind::Conv: return "conv";
    }
    return "?";
}

const char* to_string(FactorizedKind k) {
    return k == FactorizedKind::SvdPair ? "svd_pair" : "tucker_triple";
}

LayerSpec LayerSpec::fully_connected(int c, int s, DenseTensor w,
                                     std::optional<DenseTensor> b) {
    LayerSpec l;
    l.kind = LayerKind::FullyConnected;
    l.in_channels = c;
    l.out_channels = s;
    l.weight = std::move(w);
    l.bias = std::move(b);
    l.validate();
    return l;
}

LayerSpec LayerSpec::pointwise(int c, int s, DenseTensor w, std::optional<DenseTensor> b) {
    LayerSpec l;
    l.kind = LayerKind::PointwiseConv;
    l.in_channels = c;
    l.out_channels = s;
    l.weight = std::move(w);
    l.bias = std::move(b);
    l.validate();
    return l;
}

LayerSpec LayerSpec::conv(int c, int s, int k, DenseTensor w, std::optional<DenseTensor> b,
                          int padding) {
    LayerSpec l;
    l.kind = LayerKind::Conv;
    l.in_channels = c;
    l.out_channels = s;
    l.kernel_h = k;
    l.kernel_w = k;
    l.padding = padding;
    l.weight = std::move(w);
    l.bias = std::move(b);
    l.validate();
    return l;
}

void LayerSpec::validate() const {
    if (in_channels < 1 || out_channels < 1)
        throw ValidationError("layer: channel counts must be >= 1");
    if (kernel_h != kernel_w)
        throw ValidationError("layer: only square kernels are supported");
    const auto c = static_cast<std::size_t>(in_channels);
    const auto s = static_cast<std::size_t>(out_channels);
    if (kind == LayerKind::Conv) {
        if (weight.rank() != 4 || weight.dim(0) != c || weight.dim(1) != s ||
            weight.dim(2) != static_cast<std::size_t>(kernel_h) ||
            weight.dim(3) != static_cast<std::size_t>(kernel_w))
            throw ShapeError("conv layer weight must be {C,S,h,w}, got " +
                             shape_str(weight.shape()));
    } else {
        if (kernel_h != 1)
            throw ValidationError("fc/pointwise layers require 1x1 kernels");
        if (weight.rank() != 2 || weight.dim(0) != c || weight.dim(1) != s)
            throw ShapeError("fc/pointwise weight must be {C,S}, got " +
                             shape_str(weight.shape()));
    }
    if (bias && bias->size() != s)
        throw ShapeError("bias length " + std::to_string(bias->size()) +
                         " != out_channels " + std::to_string(out_channels));
}

void FactorizedLayer::validate() const {
    const std::size_t expect = kind == FactorizedKind::SvdPair ? 2 : 3;
    if (sublayers.size() != expect)
        throw ValidationError("factorized layer: expected " + std::to_string(expect) +
                              " sublayers");
    if (ranks.size() != expect - 1)
        throw ValidationError("factorized layer: rank list length mismatch");
    for (const auto& s : sublayers) s.validate();
    for (std::size_t i = 0; i + 1 < sublayers.size(); ++i) {
        if (sublayers[i].out_channels != sublayers[i + 1].in_channels)
            throw ShapeError("factorized layer: sublayer channel chain broken");
        if (sublayers[i].bias)
            throw ValidationError("factorized layer: bias allowed on last sublayer only");
    }
    if (kind == FactorizedKind::TuckerTriple) {
        if (sublayers[0].kind != LayerKind::PointwiseConv ||
            sublayers[1].kind != LayerKind::Conv ||
            sublayers[2].kind != LayerKind::PointwiseConv)
            throw ValidationError("tucker triple must be 1x1 / k x k / 1x1");
    }
}

long long param_count(const LayerSpec& layer) {
    long long n = static_cast<long long>(layer.weight.size());
    if (layer.bias) n += static_cast<long long>(layer.bias->size());
    return n;
}

long long param_count(const FactorizedLayer& layer) {
    long long n = 0;
    for (const auto& s : layer.sublayers) n += param_count(s);
    return n;
}

DenseTensor operator_weight(const LayerSpec& layer) {
    const auto c = static_cast<std::size_t>(layer.in_channels);
    const auto s = static_cast<std::size_t>(layer.out_channels);
    if (layer.kind == LayerKind::Conv) {
        const auto kh = static_cast<std::size_t>(layer.kernel_h);
        const auto kw = static_cast<std::size_t>(layer.kernel_w);
        DenseTensor w({s, c, kh, kw});
        for (std::size_t ci = 0; ci < c; ++ci)
            for (std::size_t si = 0; si < s; ++si)
                for (std::size_t i = 0; i < kh; ++i)
                    for (std::size_t j = 0; j < kw; ++j)
                        w(si, ci, i, j) = layer.weight(ci, si, i, j);
        return w;
    }
    DenseTensor w({s, c, 1, 1});
    for (std::size_t ci = 0; ci < c; ++ci)
        for (std::size_t si = 0; si < s; ++si) w(si, ci, 0, 0) = layer.weight(ci, si);
    return w;
}

DenseTensor layer_forward(const LayerSpec& layer, const DenseTensor& x) {
    if (x.rank() == 2 && layer.kind != LayerKind::Conv) {
        if (x.dim(1) != static_cast<std::size_t>(layer.in_channels))
            throw ShapeError("layer_forward: input features " + std::to_string(x.dim(1)) +
                             " != in_channels " + std::to_string(layer.in_channels));
        DenseTensor y = matmul(x, layer.weight);  // {N,C} x {C,S}
        if (layer.bias) {
            for (std::size_t i = 0; i < y.rows(); ++i)
                for (std::size_t j = 0; j < y.cols(); ++j) y(i, j) += (*layer.bias)[j];
        }
        return y;
    }
    if (x.rank() != 4)
        throw ShapeError("layer_forward: expected {N,C,H,W} or {N,C} input, got " +
                         shape_str(x.shape()));
    return conv2d(x, operator_weight(layer), layer.bias, layer.padding);
}

DenseTensor layer_forward(const FactorizedLayer& layer, const DenseTensor& x) {
    DenseTensor cur = x;
    for (const auto& sub : layer.sublayers) cur = layer_forward(sub, cur);
    return cur;
}

}  // namespace lrd
