#pragma once

#include <optional>
#include <string>

#include "lrd/bench.hpp"
#include "lrd/layer.hpp"

namespace lrd {

/// Requested compression ratio alpha and the r2 = beta * r1 coupling between
/// the two Tucker ranks.
struct CompressionTarget {
    double alpha = 2.0;
    double beta = 1.0;

    /// alpha == 1 is the no-compression boundary of the rank formula and is
    /// accepted here; user-facing commands require alpha > 1.
    void validate() const {
        if (!(alpha >= 1.0)) throw ValidationError("compression ratio alpha must be >= 1");
        if (!(beta > 0.0)) throw ValidationError("rank ratio beta must be > 0");
    }
};

/// Closed-form Tucker-2 ranks for a k x k conv layer at compression ratio
/// alpha: r1 from the quadratic parameter-budget formula, r2 = beta * r1,
/// both floored and clamped into [1, C] / [1, S].
struct TuckerRanks {
    int r1 = 1;
    int r2 = 1;
};
TuckerRanks tucker_ranks_for_compression(int c, int s, int k, const CompressionTarget& target);

/// Rank at which the next integer compression ratio (alpha + 1) is reached;
/// the lower bound of the optimizer's sweep. Always <= the alpha rank.
int rmin_for_next_ratio(int c, int s, int k, const CompressionTarget& target);

/// SVD-pair rank for an FC / 1x1 layer: r = floor(C*S / (alpha*(C+S))),
/// clamped to >= 1 (the pair then has r*(C+S) <= C*S/alpha parameters).
int fc_rank_for_compression(int c, int s, double alpha);

/// Outcome of the per-layer benchmark-driven rank search.
struct RankPlan {
    std::string layer_id;
    int rank_start = 0;       // R, from the compression-ratio formula
    int rank_min = 0;         // R_min, from the (alpha + 1) formula
    int rank_opt = 0;         // selected rank
    bool keep_original = false;
    double original_time = 0.0;  // T
    double opt_time = 0.0;       // t(R_opt)
    double plan_seconds = 0.0;   // wall time spent planning this layer
    TimingCurve curve;
};

/// Sweeps ranks in [rank_min, rank_start], measures the step time of the
/// decomposed layer at each rank, and picks the rank where the step-time
/// first difference dt(r) = t(r+1) - t(r) has its first significant local
/// maximum scanning from the top rank downward (threshold: max of 5% of
/// t(R) and the measurement noise floor). If no peak clears the threshold,
/// the argmax of dt wins, ties to the larger rank. keep_original is set
/// when the original layer is at least as fast as the selected rank.
RankPlan optimize_rank(const LayerSpec& layer, int rank_start, int rank_min,
                       const std::vector<std::size_t>& input_shape, const CostBackend& backend,
                       const RankDecomposer& decomposer, std::string layer_id = "");

/// Default per-kind decomposer: SVD pair for FC/1x1 layers, Tucker-2 with
/// r2 = beta * r for conv layers (mode SVDs cached across the sweep).
RankDecomposer make_default_decomposer(const LayerSpec& layer, double beta = 1.0);

}  // namespace lrd
