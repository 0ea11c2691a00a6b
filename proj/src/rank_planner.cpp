#include "lrd/rank_planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

#include "lrd/decompose.hpp"

namespace lrd {

namespace {

int clamp_rank(double value, int hi) {
    const int r = static_cast<int>(std::floor(value));
    return std::max(1, std::min(r, hi));
}

/// r1 solving C*r1 + beta*k^2*r1^2 + beta*r1*S = C*S*k^2 / ratio, the
/// positive root of the parameter-budget quadratic.
double tucker_rank_real(int c, int s, int k, double ratio, double beta) {
    const double cd = c, sd = s;
    const double k2 = static_cast<double>(k) * k;
    const double lin = (cd + beta * sd) / (beta * k2);
    const double disc = lin * lin + 4.0 * cd * sd / (beta * ratio);
    return (-lin + std::sqrt(disc)) / 2.0;
}

}  // namespace

TuckerRanks tucker_ranks_for_compression(int c, int s, int k, const CompressionTarget& target) {
    target.validate();
    if (c < 1 || s < 1 || k < 1) throw ValidationError("layer dims must be >= 1");
    const double real = tucker_rank_real(c, s, k, target.alpha, target.beta);
    TuckerRanks r;
    r.r1 = clamp_rank(real, c);
    r.r2 = clamp_rank(target.beta * static_cast<double>(r.r1), s);
    return r;
}

int rmin_for_next_ratio(int c, int s, int k, const CompressionTarget& target) {
    target.validate();
    if (c < 1 || s < 1 || k < 1) throw ValidationError("layer dims must be >= 1");
    const double real = tucker_rank_real(c, s, k, target.alpha + 1.0, target.beta);
    return clamp_rank(real, c);
}

int fc_rank_for_compression(int c, int s, double alpha) {
    if (c < 1 || s < 1) throw ValidationError("layer dims must be >= 1");
    if (!(alpha >= 1.0)) throw ValidationError("compression ratio alpha must be >= 1");
    const double real = (static_cast<double>(c) * s) / (alpha * (static_cast<double>(c) + s));
    return clamp_rank(real, std::min(c, s));
}

RankDecomposer make_default_decomposer(const LayerSpec& layer, double beta) {
    if (layer.kind == LayerKind::Conv) {
        auto shared = std::make_shared<TuckerDecomposer>(layer);
        return [shared, beta](const LayerSpec& l, int r) {
            const int r2 = std::max(1, std::min(static_cast<int>(std::floor(beta * r)),
                                                l.out_channels));
            return shared->factorize(r, r2);
        };
    }
    return [](const LayerSpec& l, int r) { return decompose_fc(l, r); };
}

RankPlan optimize_rank(const LayerSpec& layer, int rank_start, int rank_min,
                       const std::vector<std::size_t>& input_shape, const CostBackend& backend,
                       const RankDecomposer& decomposer, std::string layer_id) {
    if (rank_min < 1 || rank_min > rank_start)
        throw ValidationError("optimize_rank: need 1 <= R_min <= R");
    const auto wall0 = std::chrono::steady_clock::now();

    RankPlan plan;
    plan.layer_id = std::move(layer_id);
    plan.rank_start = rank_start;
    plan.rank_min = rank_min;
    plan.curve = timing_curve(layer, rank_min, rank_start, input_shape, backend, decomposer);

    const auto& t = plan.curve.t;
    const auto& dt = plan.curve.dt;
    plan.original_time = plan.curve.original_time;

    int opt = rank_start;
    if (!dt.empty()) {
        const double threshold =
            std::max(0.05 * t.back(), plan.curve.noise_floor);
        auto is_local_max = [&](std::size_t i) {
            const double left = i > 0 ? dt[i - 1] : -1.0 / 0.0;
            const double right = i + 1 < dt.size() ? dt[i + 1] : -1.0 / 0.0;
            return dt[i] >= left && dt[i] >= right;
        };
        bool found = false;
        for (std::size_t i = dt.size(); i-- > 0;) {  // largest rank first
            if (dt[i] > threshold && is_local_max(i)) {
                opt = plan.curve.ranks[i];
                found = true;
                break;
            }
        }
        if (!found) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < dt.size(); ++i)
                if (dt[i] >= dt[best]) best = i;  // ties to the larger rank
            opt = plan.curve.ranks[best];
        }
    }
    plan.rank_opt = opt;
    plan.opt_time = t[static_cast<std::size_t>(opt - rank_min)];
    plan.keep_original = !(plan.opt_time < plan.original_time);
    plan.plan_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    return plan;
}

}  // namespace lrd
