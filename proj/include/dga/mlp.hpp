#pragma once

// Feedforward multilayer perceptron over ratio codes: seeded initialization,
// forward pass and decoding of the output layer into a fault class.
//
// Layer l maps activations a^{l-1} (fan_in values) to
//   s_j = f( sum_i a_i * w[i*fan_out + j] + bias_j ),
// with the logistic sigmoid on hidden layers and the identity on the output
// layer. Outputs are saturated into [0,1] only when decoded.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dga/ratios.hpp"

namespace dga {

enum class Activation { Logsig, Linear };

inline std::string_view to_string(Activation a) {
    return a == Activation::Logsig ? "logsig" : "linear";
}

/// Logistic sigmoid, strictly within (0,1).
inline double logsig(double n) { return 1.0 / (1.0 + std::exp(-n)); }

/// Network weights and topology. `weights[l]` is the row-major fan_in x
/// fan_out matrix feeding non-input layer l, entry [i*fan_out + j] connecting
/// previous-layer neuron i to neuron j; `biases[l]` holds that layer's
/// per-neuron offsets.
struct MlpNetwork {
    RatioMethod method = RatioMethod::Iec;
    std::vector<int> layer_sizes;
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
    Activation hidden_activation = Activation::Logsig;
    Activation output_activation = Activation::Linear;
    std::uint32_t seed = 0;

    std::size_t layer_count() const { return layer_sizes.size(); }
    int input_size() const { return layer_sizes.front(); }
    int output_size() const { return layer_sizes.back(); }

    friend bool operator==(const MlpNetwork&, const MlpNetwork&) = default;
};

namespace detail {

/// 53-bit uniform double in [0,1) from two mt19937 words. Fully specified by
/// the generator, so seeded draws are identical across platforms.
inline double uniform53(std::mt19937& gen) {
    const std::uint32_t a = gen() >> 5;  // 27 bits
    const std::uint32_t b = gen() >> 6;  // 26 bits
    return (a * 67108864.0 + b) * (1.0 / 9007199254740992.0);
}

inline void check_topology(const std::vector<int>& layer_sizes) {
    if (layer_sizes.size() < 3)
        throw std::invalid_argument(
            "init_network: need input, at least one hidden, and output layer");
    for (int n : layer_sizes)
        if (n < 1) throw std::invalid_argument("init_network: layer sizes must be >= 1");
}

}  // namespace detail

/// Builds a network with weights and biases drawn uniformly from [-0.5, 0.5].
/// Draw order: per non-input layer, the weight matrix row-major, then the
/// biases. Identical (layer_sizes, seed) give bit-identical networks.
inline MlpNetwork init_network(RatioMethod method, const std::vector<int>& layer_sizes,
                               std::uint32_t seed) {
    detail::check_topology(layer_sizes);
    MlpNetwork net;
    net.method = method;
    net.layer_sizes = layer_sizes;
    net.seed = seed;
    std::mt19937 gen(seed);
    for (std::size_t l = 1; l < layer_sizes.size(); ++l) {
        const auto fan_in = static_cast<std::size_t>(layer_sizes[l - 1]);
        const auto fan_out = static_cast<std::size_t>(layer_sizes[l]);
        std::vector<double> w(fan_in * fan_out);
        for (double& x : w) x = detail::uniform53(gen) - 0.5;
        std::vector<double> b(fan_out);
        for (double& x : b) x = detail::uniform53(gen) - 0.5;
        net.weights.push_back(std::move(w));
        net.biases.push_back(std::move(b));
    }
    return net;
}

namespace detail {

/// Forward pass keeping every layer's activations (index 0 = the input).
inline std::vector<std::vector<double>> forward_trace(const MlpNetwork& net,
                                                      std::span<const double> input) {
    if (input.size() != static_cast<std::size_t>(net.input_size()))
        throw std::invalid_argument("forward: input length does not match input layer");
    std::vector<std::vector<double>> trace;
    trace.reserve(net.layer_count());
    trace.emplace_back(input.begin(), input.end());
    for (std::size_t l = 0; l + 1 < net.layer_count(); ++l) {
        const auto fan_in = static_cast<std::size_t>(net.layer_sizes[l]);
        const auto fan_out = static_cast<std::size_t>(net.layer_sizes[l + 1]);
        const bool last = l + 2 == net.layer_count();
        const Activation act = last ? net.output_activation : net.hidden_activation;
        std::vector<double> out(fan_out);
        const auto& prev = trace.back();
        for (std::size_t j = 0; j < fan_out; ++j) {
            double sum = net.biases[l][j];
            for (std::size_t i = 0; i < fan_in; ++i)
                sum += prev[i] * net.weights[l][i * fan_out + j];
            out[j] = act == Activation::Logsig ? logsig(sum) : sum;
        }
        trace.push_back(std::move(out));
    }
    return trace;
}

}  // namespace detail

/// Output-layer vector for one input (raw, not saturated).
inline std::vector<double> forward(const MlpNetwork& net, std::span<const double> input) {
    return detail::forward_trace(net, input).back();
}

/// Forward pass on a ratio-code vector.
inline std::vector<double> forward(const MlpNetwork& net, const CodeVector& codes) {
    std::vector<double> input(codes.codes.begin(), codes.codes.end());
    return forward(net, input);
}

struct Decoded {
    int class_index = 0;  // 1-based
    double confidence = 0.0;
    bool low_confidence = false;
};

/// Picks the strongest output unit. Ties go to the lowest class index; the
/// winning value is clipped into [0,1] to serve as a confidence.
inline Decoded decode_output(std::span<const double> output, double threshold = 0.5) {
    if (output.empty())
        throw std::invalid_argument("decode_output: empty output vector");
    const auto best = std::max_element(output.begin(), output.end());
    Decoded d;
    d.class_index = static_cast<int>(best - output.begin()) + 1;
    d.confidence = std::clamp(*best, 0.0, 1.0);
    d.low_confidence = d.confidence < threshold;
    return d;
}

}  // namespace dga
