#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lrd/tensor.hpp"

namespace lrd {

enum class LayerKind { FullyConnected, PointwiseConv, Conv };

const char* to_string(LayerKind k);

/// One trainable layer in the channels-first weight layout: FC and 1x1 conv
/// weights are {C,S} (input channels leading), k x k conv weights {C,S,h,w}.
/// A fully connected layer maps x to W^T x + b under this layout.
struct LayerSpec {
    LayerKind kind = LayerKind::FullyConnected;
    int in_channels = 0;   // C
    int out_channels = 0;  // S
    int kernel_h = 1;
    int kernel_w = 1;
    int padding = 0;  // conv layers only
    DenseTensor weight;
    std::optional<DenseTensor> bias;  // {S}

    static LayerSpec fully_connected(int c, int s, DenseTensor w,
                                     std::optional<DenseTensor> b = std::nullopt);
    static LayerSpec pointwise(int c, int s, DenseTensor w,
                               std::optional<DenseTensor> b = std::nullopt);
    static LayerSpec conv(int c, int s, int k, DenseTensor w,
                          std::optional<DenseTensor> b = std::nullopt, int padding = 0);

    /// Validates shape consistency; throws ShapeError/ValidationError.
    void validate() const;

    bool is_conv_like() const { return kind != LayerKind::FullyConnected; }
    int kernel_size() const { return kernel_h; }
};

enum class FactorizedKind { SvdPair, TuckerTriple };

const char* to_string(FactorizedKind k);

/// Low-rank replacement of one LayerSpec. SvdPair holds two sublayers
/// (C->r then r->S); TuckerTriple holds three (1x1 C->r1, k x k r1->r2,
/// 1x1 r2->S). The bias of the original layer, when present, lives on the
/// last sublayer only.
struct FactorizedLayer {
    FactorizedKind kind = FactorizedKind::SvdPair;
    std::vector<LayerSpec> sublayers;
    std::vector<int> ranks;  // {r} or {r1, r2}
    std::string origin;      // id of the replaced layer

    void validate() const;
    int in_channels() const { return sublayers.front().in_channels; }
    int out_channels() const { return sublayers.back().out_channels; }
};

/// Weights plus biases; a FactorizedLayer sums its sublayers.
long long param_count(const LayerSpec& layer);
long long param_count(const FactorizedLayer& layer);

/// Forward application of a single layer. FC expects {N,C} input; conv-like
/// layers expect {N,C,H,W}. A pointwise layer accepts either.
DenseTensor layer_forward(const LayerSpec& layer, const DenseTensor& x);
DenseTensor layer_forward(const FactorizedLayer& layer, const DenseTensor& x);

/// Conv weight permuted to the {S,C,h,w} operator layout used by conv2d.
DenseTensor operator_weight(const LayerSpec& layer);

}  // namespace lrd
