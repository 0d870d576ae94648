#include "zec/nn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "zec/domain.hpp"

namespace zec::nn {

namespace {

constexpr const char* kCheckpointMagic = "zec-qnetwork";
constexpr int kCheckpointVersion = 1;

Layer make_layer(int inputs, int outputs)
{
    Layer l;
    l.inputs = inputs;
    l.outputs = outputs;
    l.weights.assign(static_cast<std::size_t>(inputs) * static_cast<std::size_t>(outputs), 0.0);
    l.biases.assign(static_cast<std::size_t>(outputs), 0.0);
    return l;
}

}  // namespace

void Gradients::zero()
{
    for (auto& l : layers) {
        std::fill(l.weights.begin(), l.weights.end(), 0.0);
        std::fill(l.biases.begin(), l.biases.end(), 0.0);
    }
}

void Gradients::scale(double factor)
{
    for (auto& l : layers) {
        for (double& w : l.weights) w *= factor;
        for (double& b : l.biases) b *= factor;
    }
}

bool operator==(const Layer& a, const Layer& b)
{
    return a.inputs == b.inputs && a.outputs == b.outputs && a.weights == b.weights && a.biases == b.biases;
}

bool operator==(const QNetwork& a, const QNetwork& b)
{
    return a.sizes_ == b.sizes_ && a.layers_ == b.layers_;
}

QNetwork::QNetwork(std::vector<int> sizes) : sizes_(std::move(sizes))
{
    if (sizes_.size() < 2) throw ShapeError("network needs at least an input and an output layer");
    if (sizes_.back() != 1) throw ShapeError("network must have a single output");
    for (int s : sizes_) {
        if (s < 1) throw ShapeError("layer sizes must be positive");
    }
    for (std::size_t k = 1; k < sizes_.size(); ++k) layers_.push_back(make_layer(sizes_[k - 1], sizes_[k]));
}

QNetwork QNetwork::glorot(std::vector<int> sizes, std::mt19937_64& rng)
{
    QNetwork net(std::move(sizes));
    for (auto& l : net.layers_) {
        const double limit = std::sqrt(6.0 / (l.inputs + l.outputs));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (double& w : l.weights) w = dist(rng);
    }
    return net;
}

std::size_t QNetwork::parameter_count() const
{
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.weights.size() + l.biases.size();
    return n;
}

bool QNetwork::all_finite() const
{
    for (const auto& l : layers_) {
        for (double w : l.weights) {
            if (!std::isfinite(w)) return false;
        }
        for (double b : l.biases) {
            if (!std::isfinite(b)) return false;
        }
    }
    return true;
}

Gradients QNetwork::make_gradients() const
{
    Gradients g;
    for (const auto& l : layers_) g.layers.push_back(make_layer(l.inputs, l.outputs));
    return g;
}

Workspace QNetwork::make_workspace() const
{
    Workspace ws;
    for (const auto& l : layers_) {
        ws.activations.emplace_back(static_cast<std::size_t>(l.outputs), 0.0);
        ws.deltas.emplace_back(static_cast<std::size_t>(l.outputs), 0.0);
    }
    return ws;
}

void QNetwork::propagate_hidden(std::size_t first_layer, Workspace& ws) const
{
    // ws.activations[first_layer - 1] holds post-activation values.
    for (std::size_t k = first_layer; k < layers_.size(); ++k) {
        const Layer& l = layers_[k];
        const auto& in = ws.activations[k - 1];
        auto& out = ws.activations[k];
        const bool last = k + 1 == layers_.size();
        for (int o = 0; o < l.outputs; ++o) {
            const double* row = &l.weights[static_cast<std::size_t>(o * l.inputs)];
            double z = l.biases[static_cast<std::size_t>(o)];
            for (int i = 0; i < l.inputs; ++i) z += row[i] * in[static_cast<std::size_t>(i)];
            out[static_cast<std::size_t>(o)] = last ? z : sigmoid(z);
        }
    }
}

double QNetwork::forward(std::span<const double> input) const
{
    Workspace ws = make_workspace();
    return forward(input, ws);
}

double QNetwork::forward(std::span<const double> input, Workspace& ws) const
{
    if (layers_.empty()) throw ShapeError("empty network");
    if (static_cast<int>(input.size()) != inputs()) {
        throw ShapeError("input has " + std::to_string(input.size()) + " values, network expects " +
                         std::to_string(inputs()));
    }
    const Layer& l = layers_.front();
    auto& out = ws.activations.front();
    const bool last = layers_.size() == 1;
    for (int o = 0; o < l.outputs; ++o) {
        double z = l.biases[static_cast<std::size_t>(o)];
        for (int i = 0; i < l.inputs; ++i) z += l.w(o, i) * input[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(o)] = last ? z : sigmoid(z);
    }
    propagate_hidden(1, ws);
    return ws.activations.back().front();
}

double QNetwork::forward_sparse(std::span<const int> active) const
{
    Workspace ws = make_workspace();
    return forward_sparse(active, ws);
}

double QNetwork::forward_sparse(std::span<const int> active, Workspace& ws) const
{
    if (layers_.empty()) throw ShapeError("empty network");
    for (int idx : active) {
        if (idx < 0 || idx >= inputs()) throw ShapeError("active index out of range");
    }
    const Layer& l = layers_.front();
    auto& out = ws.activations.front();
    const bool last = layers_.size() == 1;
    for (int o = 0; o < l.outputs; ++o) {
        const double* row = &l.weights[static_cast<std::size_t>(o * l.inputs)];
        double z = l.biases[static_cast<std::size_t>(o)];
        for (int idx : active) z += row[idx];
        out[static_cast<std::size_t>(o)] = last ? z : sigmoid(z);
    }
    propagate_hidden(1, ws);
    return ws.activations.back().front();
}

void QNetwork::backward_from(double scale, Workspace& ws, Gradients& grads) const
{
    // The output unit is linear, so its delta is just the incoming scale.
    ws.deltas.back().front() = scale;
    for (std::size_t k = layers_.size() - 1; k >= 1; --k) {
        const Layer& l = layers_[k];
        Layer& g = grads.layers[k];
        const auto& delta = ws.deltas[k];
        const auto& below = ws.activations[k - 1];
        auto& delta_below = ws.deltas[k - 1];
        std::fill(delta_below.begin(), delta_below.end(), 0.0);
        for (int o = 0; o < l.outputs; ++o) {
            const double d = delta[static_cast<std::size_t>(o)];
            g.biases[static_cast<std::size_t>(o)] += d;
            const double* row = &l.weights[static_cast<std::size_t>(o * l.inputs)];
            double* grow = &g.weights[static_cast<std::size_t>(o * l.inputs)];
            for (int i = 0; i < l.inputs; ++i) {
                grow[i] += d * below[static_cast<std::size_t>(i)];
                delta_below[static_cast<std::size_t>(i)] += d * row[i];
            }
        }
        for (std::size_t i = 0; i < delta_below.size(); ++i) {
            const double a = below[i];
            delta_below[i] *= a * (1.0 - a);
        }
    }
}

void QNetwork::backward(std::span<const double> input, double scale, Workspace& ws, Gradients& grads) const
{
    if (static_cast<int>(input.size()) != inputs()) throw ShapeError("input size mismatch in backward");
    if (layers_.size() == 1) {
        ws.deltas.front().front() = scale;
    } else {
        backward_from(scale, ws, grads);
    }
    const Layer& l = layers_.front();
    Layer& g = grads.layers.front();
    const auto& delta = ws.deltas.front();
    for (int o = 0; o < l.outputs; ++o) {
        const double d = delta[static_cast<std::size_t>(o)];
        g.biases[static_cast<std::size_t>(o)] += d;
        for (int i = 0; i < l.inputs; ++i) g.w(o, i) += d * input[static_cast<std::size_t>(i)];
    }
}

void QNetwork::backward_sparse(std::span<const int> active, double scale, Workspace& ws, Gradients& grads) const
{
    if (layers_.size() == 1) {
        ws.deltas.front().front() = scale;
    } else {
        backward_from(scale, ws, grads);
    }
    const Layer& l = layers_.front();
    Layer& g = grads.layers.front();
    const auto& delta = ws.deltas.front();
    for (int o = 0; o < l.outputs; ++o) {
        const double d = delta[static_cast<std::size_t>(o)];
        g.biases[static_cast<std::size_t>(o)] += d;
        for (int idx : active) g.w(o, idx) += d;
    }
}

void QNetwork::apply(const Gradients& grads, double learning_rate)
{
    if (grads.layers.size() != layers_.size()) throw ShapeError("gradient shape mismatch");
    for (std::size_t k = 0; k < layers_.size(); ++k) {
        auto& l = layers_[k];
        const auto& g = grads.layers[k];
        if (g.weights.size() != l.weights.size() || g.biases.size() != l.biases.size()) {
            throw ShapeError("gradient shape mismatch");
        }
        for (std::size_t i = 0; i < l.weights.size(); ++i) l.weights[i] -= learning_rate * g.weights[i];
        for (std::size_t i = 0; i < l.biases.size(); ++i) l.biases[i] -= learning_rate * g.biases[i];
    }
}

void QNetwork::save(const std::filesystem::path& path) const
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
    out << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
    out << "sizes";
    for (int s : sizes_) out << ' ' << s;
    out << '\n';
    for (const auto& l : layers_) {
        out << "layer " << l.inputs << ' ' << l.outputs << '\n';
        for (double w : l.weights) out << format_double(w) << '\n';
        for (double b : l.biases) out << format_double(b) << '\n';
    }
    if (!out) throw std::runtime_error("checkpoint write failed: " + path.string());
}

QNetwork QNetwork::load(const std::filesystem::path& path, const std::vector<int>& expected_sizes)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != kCheckpointMagic) throw ShapeError("not a network checkpoint: " + path.string());
    if (version != kCheckpointVersion) {
        throw ShapeError("unsupported checkpoint version " + std::to_string(version));
    }
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    std::istringstream sizes_line(line);
    std::string tag;
    sizes_line >> tag;
    if (tag != "sizes") throw ShapeError("checkpoint is missing its sizes line");
    std::vector<int> sizes;
    for (int s = 0; sizes_line >> s;) sizes.push_back(s);
    if (!expected_sizes.empty() && sizes != expected_sizes) {
        throw ShapeError("checkpoint shape does not match the expected network");
    }
    QNetwork net(sizes);
    auto read_value = [&](const char* what) {
        std::string token;
        if (!(in >> token)) throw ShapeError(std::string("checkpoint truncated reading ") + what);
        try {
            return parse_double(token, what);
        } catch (const InvalidInput& e) {
            throw ShapeError(e.what());
        }
    };
    for (auto& l : net.layers_) {
        int inputs = 0;
        int outputs = 0;
        if (!(in >> tag >> inputs >> outputs) || tag != "layer" || inputs != l.inputs || outputs != l.outputs) {
            throw ShapeError("checkpoint layer header does not match its sizes line");
        }
        for (double& w : l.weights) w = read_value("weight");
        for (double& b : l.biases) b = read_value("bias");
    }
    std::string extra;
    if (in >> extra) throw ShapeError("checkpoint has trailing data");
    return net;
}

}  // namespace zec::nn
