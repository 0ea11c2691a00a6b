#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "lrd/layer.hpp"

namespace lrd {

/// Measures real forward passes: median of `measure_iters` timed runs after
/// `warmup_iters` untimed ones, on a monotonic nanosecond clock. The clock is
/// injectable for tests. LRD_BENCH_WARMUP_ITERS / LRD_BENCH_MEASURE_ITERS
/// environment variables override the iteration counts.
struct WallClockBackend {
    int warmup_iters = 2;
    int measure_iters = 9;
    std::function<std::uint64_t()> now_ns;  // defaults to steady_clock
};

/// Deterministic cost model. Work is counted as FLOPs with every channel
/// dimension d replaced by an effective width E(d): d is first rounded up to
/// the next multiple of tile_width, then charged a fraction (tile_width-1)/
/// tile_width of the slack up to the next power of two, modeling partial
/// utilization of power-of-two aligned compute banks. tile_width 1 gives the
/// exact FLOP count.
struct AnalyticalBackend {
    int tile_width = 8;
    double flops_per_second = 1.0e9;
};

using CostBackend = std::variant<WallClockBackend, AnalyticalBackend>;

/// Effective channel width used by AnalyticalBackend.
double effective_width(int d, int tile_width);

/// FLOPs of one forward pass under the analytical model (2 per multiply-add,
/// one per bias add), with channel dims mapped through effective_width.
double analytical_flops(const LayerSpec& layer, const std::vector<std::size_t>& input_shape,
                        int tile_width);
double analytical_flops(const FactorizedLayer& layer,
                        const std::vector<std::size_t>& input_shape, int tile_width);

/// Median measurement plus a spread estimate (interquartile range) used as
/// the noise floor by the rank optimizer.
struct TimedSample {
    double seconds = 0.0;
    double noise = 0.0;
};

/// Seconds for one forward pass of the layer at the given input shape.
double time_layer(const LayerSpec& layer, const std::vector<std::size_t>& input_shape,
                  const CostBackend& backend);
double time_layer(const FactorizedLayer& layer, const std::vector<std::size_t>& input_shape,
                  const CostBackend& backend);

TimedSample measure_layer(const LayerSpec& layer, const std::vector<std::size_t>& input_shape,
                          const CostBackend& backend);
TimedSample measure_layer(const FactorizedLayer& layer,
                          const std::vector<std::size_t>& input_shape,
                          const CostBackend& backend);

/// Step times over an ascending rank range plus first differences
/// dt[i] = t[i+1] - t[i] and the original layer's time.
struct TimingCurve {
    std::vector<int> ranks;
    std::vector<double> t;
    std::vector<double> dt;
    double original_time = 0.0;
    double noise_floor = 0.0;
};

using RankDecomposer = std::function<FactorizedLayer(const LayerSpec&, int rank)>;

/// Evaluates the layer at every rank in [rank_lo, rank_hi] (ascending).
TimingCurve timing_curve(const LayerSpec& layer, int rank_lo, int rank_hi,
                         const std::vector<std::size_t>& input_shape,
                         const CostBackend& backend, const RankDecomposer& decomposer);

/// CSV with header "rank,t_seconds,dt_seconds"; the top rank has no dt entry.
std::string timing_curve_csv(const TimingCurve& curve);

}  // namespace lrd
