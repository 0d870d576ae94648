#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace zec::nn {

class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parameters of one fully connected layer; weights are row-major
/// [outputs x inputs].
struct Layer {
    int inputs = 0;
    int outputs = 0;
    std::vector<double> weights;
    std::vector<double> biases;

    [[nodiscard]] double& w(int out, int in) { return weights[static_cast<std::size_t>(out * inputs + in)]; }
    [[nodiscard]] double w(int out, int in) const { return weights[static_cast<std::size_t>(out * inputs + in)]; }
};

/// Gradient buffer with the same shapes as a network's layers.
struct Gradients {
    std::vector<Layer> layers;

    void zero();
    void scale(double factor);
};

/// Scratch space for one forward/backward pass; reuse it to avoid
/// allocation in the training loop.
struct Workspace {
    std::vector<std::vector<double>> activations;  // per layer output
    std::vector<std::vector<double>> deltas;
};

/// Multilayer perceptron with sigmoid hidden units and a single linear
/// output, used as the Q-value approximator.
class QNetwork {
public:
    static constexpr int kDefaultInputs = 63;

    QNetwork() = default;
    /// `sizes` = {inputs, hidden..., 1}. Parameters start at zero.
    explicit QNetwork(std::vector<int> sizes);

    /// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
    static QNetwork glorot(std::vector<int> sizes, std::mt19937_64& rng);

    [[nodiscard]] const std::vector<int>& sizes() const { return sizes_; }
    [[nodiscard]] int inputs() const { return sizes_.front(); }
    [[nodiscard]] std::vector<Layer>& layers() { return layers_; }
    [[nodiscard]] const std::vector<Layer>& layers() const { return layers_; }
    [[nodiscard]] std::size_t parameter_count() const;
    [[nodiscard]] bool all_finite() const;

    [[nodiscard]] Gradients make_gradients() const;
    [[nodiscard]] Workspace make_workspace() const;

    /// Dense reference forward pass.
    [[nodiscard]] double forward(std::span<const double> input) const;
    double forward(std::span<const double> input, Workspace& ws) const;

    /// Forward pass for a binary input given by the indices of its set bits.
    [[nodiscard]] double forward_sparse(std::span<const int> active) const;
    double forward_sparse(std::span<const int> active, Workspace& ws) const;

    /// Adds scale * d(output)/d(parameters) to `grads`, using the activations
    /// left in `ws` by the matching forward call.
    void backward(std::span<const double> input, double scale, Workspace& ws, Gradients& grads) const;
    void backward_sparse(std::span<const int> active, double scale, Workspace& ws, Gradients& grads) const;

    /// parameters -= learning_rate * grads
    void apply(const Gradients& grads, double learning_rate);

    void save(const std::filesystem::path& path) const;
    /// Loads a checkpoint. With a non-empty `expected_sizes` the stored shape
    /// must match exactly.
    static QNetwork load(const std::filesystem::path& path, const std::vector<int>& expected_sizes = {});

    friend bool operator==(const QNetwork&, const QNetwork&);

private:
    void propagate_hidden(std::size_t first_layer, Workspace& ws) const;
    void backward_from(double scale, Workspace& ws, Gradients& grads) const;

    std::vector<int> sizes_;
    std::vector<Layer> layers_;
};

bool operator==(const Layer& a, const Layer& b);

inline double sigmoid(double x)
{
    return 1.0 / (1.0 + std::exp(-x));
}

}  // namespace zec::nn
