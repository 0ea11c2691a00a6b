#pragma once

#include <cstdint>
#include <map>
#include <set>

#include "lrd/model.hpp"

namespace lrd {

enum class FreezePolicyKind { None, Regular, Sequential };
enum class ScheduleKind { Fixed, Cosine };

const char* to_string(FreezePolicyKind k);
const char* to_string(ScheduleKind k);

struct TrainConfig {
    int epochs = 10;
    double lr = 0.001;
    double momentum = 0.9;
    double weight_decay = 1.0e-4;
    ScheduleKind schedule = ScheduleKind::Fixed;
    FreezePolicyKind freeze = FreezePolicyKind::None;
    int batch_size = 32;
    std::uint64_t seed = 0;
    bool record_step_time = true;

    void validate() const;
};

/// Learning rate at epoch `epoch` of `total`. Fixed returns base_lr; Cosine
/// anneals from base_lr at epoch 0 to 0 at the final epoch.
double schedule_lr(ScheduleKind kind, double base_lr, int epoch, int total);

/// Which sublayers of each factorized node are frozen at one epoch.
struct EpochState {
    int epoch = 0;
    std::map<std::string, std::set<int>> frozen;
};

/// Sets the trainable flags of every factorized node for the given epoch.
/// Regular freezes the closed-form factors every epoch (SVD pair: sublayer 0;
/// Tucker: sublayers 0 and 2, leaving the core trainable). Sequential
/// alternates by epoch parity: even epochs match Regular, odd epochs freeze
/// the complement. Plain layers are never touched.
EpochState apply_freeze(Model& model, FreezePolicyKind policy, int epoch);

struct NodeCache {
    std::vector<DenseTensor> inputs;      // input to each sublayer
    std::vector<std::size_t> in_shape;    // flatten
    std::vector<std::size_t> argmax;      // maxpool
};

struct ForwardCache {
    DenseTensor batch;
    std::vector<NodeCache> nodes;
    DenseTensor output;
};

/// Forward pass; fills `cache` for a subsequent backward() when non-null.
DenseTensor forward(const Model& model, const DenseTensor& batch,
                    ForwardCache* cache = nullptr);

/// Parameter gradients keyed by the names from parameters(); frozen
/// parameters get no entry (their weight-gradient compute is skipped), but
/// gradients still flow through them to earlier nodes.
struct Gradients {
    std::map<std::string, DenseTensor> params;
    DenseTensor input;
};

Gradients backward(const Model& model, const DenseTensor& output_grad,
                   const ForwardCache& cache);

struct LossResult {
    double loss = 0.0;
    DenseTensor grad;  // d loss / d logits
};

/// Mean softmax cross-entropy over the batch.
LossResult softmax_cross_entropy(const DenseTensor& logits, const std::vector<int>& labels);

/// Per-parameter momentum buffers, keyed like Gradients.
struct SgdState {
    std::map<std::string, DenseTensor> velocity;
};

/// v <- momentum * v + g + weight_decay * w;  w <- w - lr * v.
/// Parameters without a gradient entry (frozen) are left bit-unchanged,
/// including their velocity.
void sgd_step(Model& model, const Gradients& grads, SgdState& state, double lr,
              double momentum, double weight_decay);

struct Dataset {
    DenseTensor inputs;       // {N, ...}
    std::vector<int> labels;  // length N
    int num_classes = 0;

    std::size_t size() const { return labels.size(); }
};

struct EpochRecord {
    int epoch = 0;
    double loss = 0.0;       // sample-weighted mean over the epoch's batches
    double accuracy = 0.0;   // on the full training set after the epoch
    double step_seconds = 0.0;  // median train step, 0 when timing is off
    double lr = 0.0;
};

/// Seeded SGD training loop: shuffles each epoch with a deterministic
/// generator, applies the freeze policy at every epoch boundary, and
/// records one row per epoch.
std::vector<EpochRecord> train(Model& model, const Dataset& data, const TrainConfig& config);

double evaluate_accuracy(const Model& model, const Dataset& data, int batch_size = 64);

/// CSV with header "epoch,loss,accuracy,step_time".
std::string history_csv(const std::vector<EpochRecord>& history);

}  // namespace lrd
