#include "lrd/model.hpp"

#include <algorithm>

namespace lrd {

const char* to_string(OpKind k) {
    switch (k) {
        case OpKind::Relu: return "relu";
        case OpKind::MaxPool2: return "maxpool2";
        case OpKind::Flatten: return "flatten";
    }
    return "?";
}

ModelNode& Model::node(const std::string& id) {
    for (auto& n : nodes)
        if (n.id == id) return n;
    throw ValidationError("unknown layer id: " + id);
}

const ModelNode& Model::node(const std::string& id) const {
    for (const auto& n : nodes)
        if (n.id == id) return n;
    throw ValidationError("unknown layer id: " + id);
}

bool Model::has_node(const std::string& id) const {
    return std::any_of(nodes.begin(), nodes.end(),
                       [&](const ModelNode& n) { return n.id == id; });
}

namespace {
void check_fresh_id(const Model& m, const std::string& id) {
    if (id.empty()) throw ValidationError("node id must be non-empty");
    if (m.has_node(id)) throw ValidationError("duplicate node id: " + id);
}
}  // namespace

void Model::add_layer(const std::string& id, LayerSpec layer) {
    check_fresh_id(*this, id);
    layer.validate();
    nodes.push_back({id, std::move(layer), {1}});
}

void Model::add_factorized(const std::string& id, FactorizedLayer layer) {
    check_fresh_id(*this, id);
    layer.validate();
    std::vector<std::uint8_t> flags(layer.sublayers.size(), 1);
    nodes.push_back({id, std::move(layer), std::move(flags)});
}

void Model::add_op(const std::string& id, OpKind op) {
    check_fresh_id(*this, id);
    nodes.push_back({id, op, {}});
}

long long param_count(const Model& model) {
    long long n = 0;
    for (const auto& node : model.nodes) {
        if (node.is_layer()) n += param_count(std::get<LayerSpec>(node.payload));
        else if (node.is_factorized()) n += param_count(std::get<FactorizedLayer>(node.payload));
    }
    return n;
}

int trainable_layer_units(const Model& model) {
    int units = 0;
    for (const auto& node : model.nodes) {
        if (node.is_op()) continue;
        if (std::any_of(node.trainable.begin(), node.trainable.end(),
                        [](std::uint8_t f) { return f != 0; }))
            ++units;
    }
    return units;
}

Model replace_layer(Model model, const std::string& layer_id, FactorizedLayer f) {
    f.validate();
    ModelNode& n = model.node(layer_id);
    if (!n.is_layer())
        throw ValidationError("replace_layer: node " + layer_id + " is not an original layer");
    const LayerSpec& old = std::get<LayerSpec>(n.payload);
    if (!f.origin.empty() && f.origin != layer_id)
        throw ValidationError("replace_layer: factorized layer originates from '" + f.origin +
                              "', not '" + layer_id + "'");
    if (f.in_channels() != old.in_channels || f.out_channels() != old.out_channels)
        throw ShapeError("replace_layer: channel interface mismatch for " + layer_id);
    if (old.kind == LayerKind::Conv) {
        if (f.kind != FactorizedKind::TuckerTriple ||
            f.sublayers[1].kernel_h != old.kernel_h)
            throw ShapeError("replace_layer: kernel mismatch for " + layer_id);
    }
    n.payload = std::move(f);
    n.trainable.assign(std::get<FactorizedLayer>(n.payload).sublayers.size(), 1);
    return model;
}

Model restore_layer(Model model, const std::string& layer_id, LayerSpec original) {
    original.validate();
    ModelNode& n = model.node(layer_id);
    if (!n.is_factorized())
        throw ValidationError("restore_layer: node " + layer_id + " is not factorized");
    const FactorizedLayer& f = std::get<FactorizedLayer>(n.payload);
    if (f.in_channels() != original.in_channels || f.out_channels() != original.out_channels)
        throw ShapeError("restore_layer: channel interface mismatch for " + layer_id);
    n.payload = std::move(original);
    n.trainable.assign(1, 1);
    return model;
}

std::vector<ParamRef> parameters(Model& model) {
    std::vector<ParamRef> out;
    for (std::size_t ni = 0; ni < model.nodes.size(); ++ni) {
        ModelNode& node = model.nodes[ni];
        auto push = [&](LayerSpec& l, int sub, bool flag) {
            const std::string stem =
                sub < 0 ? node.id : node.id + "/" + std::to_string(sub);
            out.push_back({stem + "/w", ni, sub, false, &l.weight, flag});
            if (l.bias) out.push_back({stem + "/b", ni, sub, true, &*l.bias, flag});
        };
        if (node.is_layer()) {
            push(std::get<LayerSpec>(node.payload), -1, node.trainable.at(0) != 0);
        } else if (node.is_factorized()) {
            auto& f = std::get<FactorizedLayer>(node.payload);
            for (std::size_t s = 0; s < f.sublayers.size(); ++s)
                push(f.sublayers[s], static_cast<int>(s), node.trainable.at(s) != 0);
        }
    }
    return out;
}

}  // namespace lrd
