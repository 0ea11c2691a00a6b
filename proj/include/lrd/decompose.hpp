#pragma once

#include <string>

#include "lrd/layer.hpp"
#include "lrd/linalg.hpp"

namespace lrd {

/// Where the singular values go in an SVD pair. The default keeps the first
/// sublayer a fixed orthonormal projection and folds all of sigma into the
/// second factor; SplitSqrt distributes sqrt(sigma) to both.
enum class SigmaPlacement { FoldIntoSecond, SplitSqrt };

/// Replace an FC or 1x1 conv layer by two consecutive layers of rank r:
/// C->r (orthonormal projection) followed by r->S. The bias moves to the
/// second sublayer. Requires 1 <= r <= min(C, S).
FactorizedLayer decompose_fc(const LayerSpec& layer, int r, std::string origin = "",
                             SigmaPlacement placement = SigmaPlacement::FoldIntoSecond);

/// Tucker-2 over the channel modes of a k x k conv layer, computed by
/// truncated HOSVD: factor matrices from the leading left singular vectors
/// of the mode-1/mode-2 unfoldings of the {C,S,k*k} weight, core projected
/// through them. Result is the 1x1 / k x k / 1x1 triple. Requires
/// 1 <= r1 <= C and 1 <= r2 <= S.
FactorizedLayer decompose_conv_tucker2(const LayerSpec& layer, int r1, int r2,
                                       std::string origin = "");

/// Low-rank approximation W' with the original layer's weight shape.
DenseTensor reconstruct(const FactorizedLayer& f);

/// Caches the mode SVDs and the fully rotated core of one conv layer so a
/// rank sweep can factorize at any (r1, r2) by slicing instead of
/// recomputing the decomposition per rank.
class TuckerDecomposer {
public:
    explicit TuckerDecomposer(const LayerSpec& layer, std::string origin = "");

    FactorizedLayer factorize(int r1, int r2) const;

    const LayerSpec& layer() const { return layer_; }

private:
    LayerSpec layer_;
    std::string origin_;
    DenseTensor u_full_;     // {C, C}
    DenseTensor v_full_;     // {S, S}
    DenseTensor core_full_;  // {C, S, k*k}
};

}  // namespace lrd
