#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mmr/activation.hpp"
#include "mmr/interval.hpp"

namespace mmr {

struct Layer {
    Eigen::MatrixXd W;
    Eigen::VectorXd b;
    std::vector<ActivationRef> acts;  // per-node, length W.rows()
};

// L-layer feedforward network x_i = act(W_i x_{i-1} + b_i); the activation
// is applied at every layer, including the last.
struct Network {
    std::vector<Layer> layers;

    int depth() const { return static_cast<int>(layers.size()); }
    int input_dim() const { return static_cast<int>(layers.front().W.cols()); }
    int output_dim() const { return static_cast<int>(layers.back().W.rows()); }
    int layer_dim(int l) const { return static_cast<int>(layers[l - 1].W.rows()); }
    // Total neuron count sum n_i over layers 1..L.
    int total_neurons() const;

    // Throws ShapeMismatch if layer shapes do not chain.
    void validate() const;
};

// Partial network NN(k, l): layers k through l, 1-based inclusive.
struct PartialRef {
    int k = 1;
    int l = 1;
};

Eigen::VectorXd forward(const Network& net, PartialRef p, const Eigen::VectorXd& x);
// Column-wise batched evaluation of the same partial network.
Eigen::MatrixXd forward_batch(const Network& net, PartialRef p, const Eigen::MatrixXd& X);

enum class WeightEncoding {
    Decimal,  // shortest round-trip decimal text
    Hex,      // 16 hex digits per value, raw IEEE-754 bits, big-endian
};

Network parse_network(const std::string& text);
std::string serialize_network(const Network& net,
                              WeightEncoding enc = WeightEncoding::Decimal);

IntervalVector parse_box(const std::string& text);
std::string serialize_box(const IntervalVector& box);

struct IntRange {
    int lo = 1;
    int hi = 1;
    bool valid() const { return lo >= 1 && hi >= lo; }
};

// Random suite configuration; the small and large presets follow the
// paper's experiment design.
struct RandomNetConfig {
    std::string preset = "custom";  // small | large | custom
    IntRange depth{1, 5};
    IntRange input_dim{1, 10};
    IntRange output_dim{1, 10};
    IntRange hidden_width{1, 30};
    std::string activation = "relu";
    double eps = 0.1;          // input box half-width
    int count = 1000;          // suite size
    std::uint64_t base_seed = 0;

    static RandomNetConfig small_preset();
    static RandomNetConfig large_preset();
    void validate() const;  // throws ConfigError / UnknownActivation
};

// Deterministic in (cfg, seed); dimensions uniform in cfg ranges, weights
// uniform on [-1,1]/sqrt(fan_in), biases uniform on [-0.5, 0.5].
Network random_network(const RandomNetConfig& cfg, std::uint64_t seed);

// Hypercube of half-width eps around a center drawn uniformly from
// [-1,1]^{n0}.
IntervalVector random_input_box(const Network& net, std::uint64_t seed, double eps = 0.1);

}  // namespace mmr
