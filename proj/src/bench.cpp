#include "lrd/bench.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdlib>
#include <sstream>

#include "lrd/rng.hpp"

namespace lrd {

namespace {

std::uint64_t steady_now_ns() {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(
            std::chrono::steady_clock::now().time_since_epoch())
            .count());
}

int env_override(const char* name, int fallback) {
    const char* v = std::getenv(name);
    if (!v || !*v) return fallback;
    return std::max(1, std::atoi(v));
}

std::size_t conv_out(std::size_t in, std::size_t k, int padding) {
    return in + 2 * static_cast<std::size_t>(padding) - k + 1;
}

/// FLOPs for one layer given its (possibly 2-D) input; returns the output
/// shape through `out_shape` so factorized chains can be accumulated.
double layer_flops(const LayerSpec& layer, const std::vector<std::size_t>& in_shape,
                   int tile_width, std::vector<std::size_t>& out_shape) {
    const double ec = effective_width(layer.in_channels, tile_width);
    const double es = effective_width(layer.out_channels, tile_width);
    if (in_shape.size() == 2) {
        if (layer.kind == LayerKind::Conv)
            throw ShapeError("analytical_flops: conv layer needs a {N,C,H,W} input");
        const double n = static_cast<double>(in_shape[0]);
        out_shape = {in_shape[0], static_cast<std::size_t>(layer.out_channels)};
        double f = 2.0 * n * ec * es;
        if (layer.bias) f += n * es;
        return f;
    }
    if (in_shape.size() != 4)
        throw ShapeError("analytical_flops: input shape must be {N,C} or {N,C,H,W}");
    if (in_shape[1] != static_cast<std::size_t>(layer.in_channels))
        throw ShapeError("analytical_flops: channel mismatch");
    const auto kh = static_cast<std::size_t>(layer.kernel_h);
    const auto kw = static_cast<std::size_t>(layer.kernel_w);
    const std::size_t oh = conv_out(in_shape[2], kh, layer.padding);
    const std::size_t ow = conv_out(in_shape[3], kw, layer.padding);
    const double n = static_cast<double>(in_shape[0]);
    const double spatial = static_cast<double>(oh * ow);
    out_shape = {in_shape[0], static_cast<std::size_t>(layer.out_channels), oh, ow};
    double f = 2.0 * n * ec * es * static_cast<double>(kh * kw) * spatial;
    if (layer.bias) f += n * es * spatial;
    return f;
}

DenseTensor make_bench_input(const std::vector<std::size_t>& shape) {
    Rng rng(0x9d2c5680u);
    return rng.normal_tensor(shape);
}

template <typename Layer>
TimedSample wallclock_measure(const Layer& layer, const std::vector<std::size_t>& input_shape,
                              const WallClockBackend& wc) {
    const int warmup = env_override("LRD_BENCH_WARMUP_ITERS", wc.warmup_iters);
    const int iters = env_override("LRD_BENCH_MEASURE_ITERS", wc.measure_iters);
    if (warmup < 1 || iters < 3)
        throw ValidationError("wall-clock backend needs warmup >= 1 and measure >= 3");
    const auto now = wc.now_ns ? wc.now_ns : steady_now_ns;

    const DenseTensor input = make_bench_input(input_shape);
    for (int i = 0; i < warmup; ++i) {
        volatile double sink = layer_forward(layer, input)[0];
        (void)sink;
    }
    std::vector<double> samples;
    samples.reserve(static_cast<std::size_t>(iters));
    for (int i = 0; i < iters; ++i) {
        const std::uint64_t t0 = now();
        volatile double sink = layer_forward(layer, input)[0];
        (void)sink;
        const std::uint64_t t1 = now();
        samples.push_back(static_cast<double>(t1 - t0) * 1.0e-9);
    }
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    TimedSample out;
    out.seconds = (n % 2 == 1) ? samples[n / 2]
                               : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
    out.noise = samples[(3 * n) / 4] - samples[n / 4];
    return out;
}

template <typename Layer>
TimedSample measure_impl(const Layer& layer, const std::vector<std::size_t>& input_shape,
                         const CostBackend& backend) {
    if (const auto* an = std::get_if<AnalyticalBackend>(&backend)) {
        if (an->tile_width < 1) throw ValidationError("tile_width must be >= 1");
        TimedSample s;
        s.seconds = analytical_flops(layer, input_shape, an->tile_width) / an->flops_per_second;
        s.noise = 0.0;
        return s;
    }
    return wallclock_measure(layer, input_shape, std::get<WallClockBackend>(backend));
}

}  // namespace

double effective_width(int d, int tile_width) {
    if (d < 1) throw ValidationError("effective_width: dimension must be >= 1");
    if (tile_width < 1) throw ValidationError("effective_width: tile width must be >= 1");
    const double padded =
        static_cast<double>(tile_width) *
        static_cast<double>((d + tile_width - 1) / tile_width);
    const double bank = static_cast<double>(
        std::bit_ceil(static_cast<std::uint64_t>(padded)));
    return bank - (bank - padded) / static_cast<double>(tile_width);
}

double analytical_flops(const LayerSpec& layer, const std::vector<std::size_t>& input_shape,
                        int tile_width) {
    std::vector<std::size_t> out;
    return layer_flops(layer, input_shape, tile_width, out);
}

double analytical_flops(const FactorizedLayer& layer,
                        const std::vector<std::size_t>& input_shape, int tile_width) {
    std::vector<std::size_t> shape = input_shape;
    double total = 0.0;
    for (const auto& sub : layer.sublayers) {
        std::vector<std::size_t> next;
        total += layer_flops(sub, shape, tile_width, next);
        shape = std::move(next);
    }
    return total;
}

TimedSample measure_layer(const LayerSpec& layer, const std::vector<std::size_t>& input_shape,
                          const CostBackend& backend) {
    return measure_impl(layer, input_shape, backend);
}

TimedSample measure_layer(const FactorizedLayer& layer,
                          const std::vector<std::size_t>& input_shape,
                          const CostBackend& backend) {
    return measure_impl(layer, input_shape, backend);
}

double time_layer(const LayerSpec& layer, const std::vector<std::size_t>& input_shape,
                  const CostBackend& backend) {
    return measure_impl(layer, input_shape, backend).seconds;
}

double time_layer(const FactorizedLayer& layer, const std::vector<std::size_t>& input_shape,
                  const CostBackend& backend) {
    return measure_impl(layer, input_shape, backend).seconds;
}

TimingCurve timing_curve(const LayerSpec& layer, int rank_lo, int rank_hi,
                         const std::vector<std::size_t>& input_shape,
                         const CostBackend& backend, const RankDecomposer& decomposer) {
    if (rank_lo < 1 || rank_lo > rank_hi)
        throw ValidationError("timing_curve: invalid rank range [" + std::to_string(rank_lo) +
                              ", " + std::to_string(rank_hi) + "]");
    TimingCurve curve;
    const TimedSample base = measure_layer(layer, input_shape, backend);
    curve.original_time = base.seconds;
    curve.noise_floor = base.noise;
    curve.ranks.reserve(static_cast<std::size_t>(rank_hi - rank_lo + 1));
    for (int r = rank_lo; r <= rank_hi; ++r) {
        const FactorizedLayer f = decomposer(layer, r);
        curve.ranks.push_back(r);
        curve.t.push_back(time_layer(f, input_shape, backend));
    }
    for (std::size_t i = 0; i + 1 < curve.t.size(); ++i)
        curve.dt.push_back(curve.t[i + 1] - curve.t[i]);
    return curve;
}

std::string timing_curve_csv(const TimingCurve& curve) {
    std::ostringstream out;
    out.precision(17);
    out << "rank,t_seconds,dt_seconds\n";
    for (std::size_t i = 0; i < curve.ranks.size(); ++i) {
        out << curve.ranks[i] << ',' << curve.t[i] << ',';
        if (i < curve.dt.size()) out << curve.dt[i];
        out << '\n';
    }
    return out.str();
}

}  // namespace lrd
