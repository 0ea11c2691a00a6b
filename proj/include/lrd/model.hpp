#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "lrd/layer.hpp"

namespace lrd {

/// Parameter-free ops a model may contain between trainable layers.
enum class OpKind { Relu, MaxPool2, Flatten };

const char* to_string(OpKind k);

/// One node of a sequential model: a trainable layer, its factorized
/// replacement, or a parameter-free op. `trainable` has one flag per
/// sublayer (a single entry for a plain layer); biases follow their
/// sublayer's flag.
struct ModelNode {
    std::string id;
    std::variant<LayerSpec, FactorizedLayer, OpKind> payload;
    std::vector<std::uint8_t> trainable;

    bool is_layer() const { return std::holds_alternative<LayerSpec>(payload); }
    bool is_factorized() const { return std::holds_alternative<FactorizedLayer>(payload); }
    bool is_op() const { return std::holds_alternative<OpKind>(payload); }
};

struct Model {
    std::vector<ModelNode> nodes;

    ModelNode& node(const std::string& id);
    const ModelNode& node(const std::string& id) const;
    bool has_node(const std::string& id) const;

    void add_layer(const std::string& id, LayerSpec layer);
    void add_factorized(const std::string& id, FactorizedLayer layer);
    void add_op(const std::string& id, OpKind op);
};

long long param_count(const Model& model);

/// Number of original-layer units with at least one trainable tensor. A
/// FactorizedLayer counts as one unit (it replaced one layer).
int trainable_layer_units(const Model& model);

/// Swap the identified layer for its factorized replacement. The node must
/// hold a LayerSpec whose channel interface matches f, and f.origin, when
/// set, must equal layer_id. Returns the updated model.
Model replace_layer(Model model, const std::string& layer_id, FactorizedLayer f);

/// Inverse of replace_layer: put an original layer back.
Model restore_layer(Model model, const std::string& layer_id, LayerSpec original);

/// Mutable reference to one parameter tensor plus its addressing metadata.
struct ParamRef {
    std::string name;  // "<node>/w", "<node>/b", "<node>/<sub>/w", ...
    std::size_t node_index = 0;
    int sublayer = -1;  // -1 for plain layers
    bool is_bias = false;
    DenseTensor* tensor = nullptr;
    bool trainable = true;
};

std::vector<ParamRef> parameters(Model& model);

/// Inference-only forward pass through every node.
DenseTensor model_forward(const Model& model, const DenseTensor& batch);

}  // namespace lrd
