#pragma once

// Levenberg-Marquardt training for MlpNetwork on one-hot pattern sets, with
// an analytic Jacobian, leave-one-out cross-validation for topology search,
// and a deterministic step-accept loop:
//
//   solve (J'J + mu*I) d = -J'e; accept d when the MSE strictly drops, then
//   mu /= mu_factor; otherwise mu *= mu_factor and retry. Stops at the MSE
//   goal or the epoch cap; mu exceeding mu_max with the step still rejected
//   raises TrainingFailure carrying the partial report.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dga/mlp.hpp"

namespace dga {

/// One supervised pattern: ratio codes in, one-hot fault class out.
struct TrainingPattern {
    std::vector<double> input;
    std::vector<double> target;

    /// 1-based class index of the one-hot target.
    int target_class() const {
        for (std::size_t k = 0; k < target.size(); ++k)
            if (target[k] == 1.0) return static_cast<int>(k) + 1;
        return 0;
    }
};

struct TrainConfig {
    double mse_goal = 1e-3;
    int max_epochs = 1000;
    double mu_init = 1e-3;
    double mu_factor = 10.0;
    double mu_max = 1e10;
    std::uint32_t seed = 42;
};

inline void validate(const TrainConfig& c) {
    if (!(c.mse_goal > 0) || c.max_epochs <= 0 || !(c.mu_init > 0) ||
        !(c.mu_factor > 1) || !(c.mu_max > 0))
        throw std::invalid_argument("TrainConfig: all values must be positive and mu_factor > 1");
}

enum class StopReason { GoalReached, MaxEpochs, MuOverflow };

inline std::string_view to_string(StopReason r) {
    switch (r) {
        case StopReason::GoalReached: return "goal reached";
        case StopReason::MaxEpochs: return "epoch limit";
        case StopReason::MuOverflow: return "damping limit";
    }
    return "?";
}

/// Training outcome. `history` starts at the initial MSE and appends one
/// entry per accepted step, so it is non-increasing.
struct TrainReport {
    int epochs = 0;
    double final_mse = 0.0;
    std::vector<double> history;
    bool converged = false;
    StopReason stop_reason = StopReason::GoalReached;
};

/// Raised when no step can be accepted before mu exceeds mu_max, or the
/// damped normal equations stay singular at mu_max. Carries the partial
/// report and the best network reached.
class TrainingFailure : public std::runtime_error {
public:
    TrainingFailure(std::string what, TrainReport report, MlpNetwork net)
        : std::runtime_error(std::move(what)),
          report(std::move(report)),
          net(std::move(net)) {}

    TrainReport report;
    MlpNetwork net;
};

// ---------------------------------------------------------------------------
// Parameter packing
//
// The trainable parameter vector lists, for each non-input layer in order,
// the weight matrix row-major and then the bias vector — the same layout the
// model file stores per layer.
// ---------------------------------------------------------------------------

inline std::size_t parameter_count(const MlpNetwork& net) {
    std::size_t n = 0;
    for (std::size_t l = 0; l < net.weights.size(); ++l)
        n += net.weights[l].size() + net.biases[l].size();
    return n;
}

inline std::vector<double> pack_parameters(const MlpNetwork& net) {
    std::vector<double> p;
    p.reserve(parameter_count(net));
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        p.insert(p.end(), net.weights[l].begin(), net.weights[l].end());
        p.insert(p.end(), net.biases[l].begin(), net.biases[l].end());
    }
    return p;
}

inline void unpack_parameters(MlpNetwork& net, std::span<const double> p) {
    if (p.size() != parameter_count(net))
        throw std::invalid_argument("unpack_parameters: length mismatch");
    std::size_t off = 0;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        std::copy_n(p.begin() + off, net.weights[l].size(), net.weights[l].begin());
        off += net.weights[l].size();
        std::copy_n(p.begin() + off, net.biases[l].size(), net.biases[l].begin());
        off += net.biases[l].size();
    }
}

/// Dense row-major matrix, just big enough for the trainer's needs.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

namespace detail {

inline void check_patterns(const MlpNetwork& net, std::span<const TrainingPattern> patterns) {
    if (patterns.empty())
        throw std::invalid_argument("training: empty pattern set");
    for (const auto& p : patterns) {
        if (p.input.size() != static_cast<std::size_t>(net.input_size()) ||
            p.target.size() != static_cast<std::size_t>(net.output_size()))
            throw std::invalid_argument("training: pattern arity does not match network");
    }
}

/// Residual vector (forward output minus target), pattern-major.
inline std::vector<double> residuals(const MlpNetwork& net,
                                     std::span<const TrainingPattern> patterns) {
    std::vector<double> e;
    e.reserve(patterns.size() * static_cast<std::size_t>(net.output_size()));
    for (const auto& p : patterns) {
        const auto out = forward(net, p.input);
        for (std::size_t k = 0; k < out.size(); ++k) e.push_back(out[k] - p.target[k]);
    }
    return e;
}

/// Solves A x = b for symmetric positive definite A by in-place Cholesky.
/// Returns false when a pivot is not strictly positive.
inline bool cholesky_solve(Matrix a, std::vector<double> b, std::vector<double>& x) {
    const std::size_t n = a.rows;
    for (std::size_t j = 0; j < n; ++j) {
        double d = a.at(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= a.at(j, k) * a.at(j, k);
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        const double ljj = std::sqrt(d);
        a.at(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a.at(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= a.at(i, k) * a.at(j, k);
            a.at(i, j) = s / ljj;
        }
    }
    // forward substitution L y = b
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= a.at(i, k) * b[k];
        b[i] = s / a.at(i, i);
    }
    // back substitution L' x = y
    x.assign(n, 0.0);
    for (std::size_t ii = n; ii > 0; --ii) {
        const std::size_t i = ii - 1;
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a.at(k, i) * x[k];
        x[i] = s / a.at(i, i);
    }
    return true;
}

}  // namespace detail

/// Mean squared error over all patterns and output components.
inline double mse(const MlpNetwork& net, std::span<const TrainingPattern> patterns) {
    detail::check_patterns(net, patterns);
    const auto e = detail::residuals(net, patterns);
    double sum = 0.0;
    for (double v : e) sum += v * v;
    return sum / static_cast<double>(e.size());
}

/// Analytic Jacobian of the residual vector: one row per (pattern, output
/// component), one column per packed parameter, filled by reverse-mode
/// accumulation through the forward trace.
inline Matrix jacobian(const MlpNetwork& net, std::span<const TrainingPattern> patterns) {
    detail::check_patterns(net, patterns);
    const auto n_out = static_cast<std::size_t>(net.output_size());
    const std::size_t n_params = parameter_count(net);
    Matrix jac(patterns.size() * n_out, n_params);

    // column offset of each layer's weight block
    std::vector<std::size_t> layer_offset(net.weights.size());
    {
        std::size_t off = 0;
        for (std::size_t l = 0; l < net.weights.size(); ++l) {
            layer_offset[l] = off;
            off += net.weights[l].size() + net.biases[l].size();
        }
    }

    for (std::size_t p = 0; p < patterns.size(); ++p) {
        const auto trace = detail::forward_trace(net, patterns[p].input);
        for (std::size_t k = 0; k < n_out; ++k) {
            const std::size_t row = p * n_out + k;
            // delta over the current layer's neurons, seeded one-hot at the
            // linear output unit k
            std::vector<double> delta(n_out, 0.0);
            delta[k] = 1.0;
            for (std::size_t l = net.weights.size(); l > 0; --l) {
                const std::size_t layer = l - 1;
                const auto fan_in = static_cast<std::size_t>(net.layer_sizes[layer]);
                const auto fan_out = static_cast<std::size_t>(net.layer_sizes[layer + 1]);
                const auto& below = trace[layer];
                for (std::size_t j = 0; j < fan_out; ++j) {
                    if (delta[j] == 0.0) continue;
                    for (std::size_t i = 0; i < fan_in; ++i)
                        jac.at(row, layer_offset[layer] + i * fan_out + j) =
                            below[i] * delta[j];
                    jac.at(row, layer_offset[layer] + fan_in * fan_out + j) = delta[j];
                }
                if (layer == 0) break;
                std::vector<double> prev_delta(fan_in, 0.0);
                for (std::size_t i = 0; i < fan_in; ++i) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < fan_out; ++j)
                        s += net.weights[layer][i * fan_out + j] * delta[j];
                    const double a = below[i];  // logsig activation of layer below
                    prev_delta[i] = s * a * (1.0 - a);
                }
                delta = std::move(prev_delta);
            }
        }
    }
    return jac;
}

/// Levenberg-Marquardt descent on the packed parameter vector. Deterministic
/// for fixed (net, patterns, config).
inline std::pair<MlpNetwork, TrainReport> train_lm(MlpNetwork net,
                                                   std::span<const TrainingPattern> patterns,
                                                   const TrainConfig& config = {}) {
    validate(config);
    detail::check_patterns(net, patterns);

    const std::size_t n_params = parameter_count(net);
    auto params = pack_parameters(net);
    double current_mse = mse(net, patterns);

    TrainReport report;
    report.history.push_back(current_mse);
    report.final_mse = current_mse;
    if (current_mse <= config.mse_goal) {
        report.converged = true;
        report.stop_reason = StopReason::GoalReached;
        return {std::move(net), std::move(report)};
    }

    double mu = config.mu_init;
    report.stop_reason = StopReason::MaxEpochs;
    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        const Matrix jac = jacobian(net, patterns);
        const auto e = detail::residuals(net, patterns);

        // normal equations: H = J'J (lower triangle mirrored), g = J'e
        Matrix h(n_params, n_params);
        for (std::size_t r = 0; r < jac.rows; ++r)
            for (std::size_t i = 0; i < n_params; ++i) {
                const double ji = jac.at(r, i);
                if (ji == 0.0) continue;
                for (std::size_t j = 0; j <= i; ++j)
                    h.at(i, j) += ji * jac.at(r, j);
            }
        for (std::size_t i = 0; i < n_params; ++i)
            for (std::size_t j = i + 1; j < n_params; ++j) h.at(i, j) = h.at(j, i);
        std::vector<double> g(n_params, 0.0);
        for (std::size_t r = 0; r < jac.rows; ++r)
            for (std::size_t i = 0; i < n_params; ++i) g[i] += jac.at(r, i) * e[r];

        bool accepted = false;
        while (!accepted) {
            Matrix damped = h;
            for (std::size_t i = 0; i < n_params; ++i) damped.at(i, i) += mu;
            std::vector<double> rhs(n_params);
            for (std::size_t i = 0; i < n_params; ++i) rhs[i] = -g[i];
            std::vector<double> step;
            const bool solved = detail::cholesky_solve(std::move(damped), std::move(rhs), step);
            if (solved) {
                auto trial = params;
                for (std::size_t i = 0; i < n_params; ++i) trial[i] += step[i];
                MlpNetwork trial_net = net;
                unpack_parameters(trial_net, trial);
                const double trial_mse = mse(trial_net, patterns);
                if (trial_mse < current_mse) {
                    params = std::move(trial);
                    net = std::move(trial_net);
                    current_mse = trial_mse;
                    mu = std::max(mu / config.mu_factor, 1e-20);
                    report.history.push_back(current_mse);
                    report.final_mse = current_mse;
                    report.epochs = epoch;
                    accepted = true;
                    continue;
                }
            }
            if (mu >= config.mu_max) {
                report.stop_reason = StopReason::MuOverflow;
                throw TrainingFailure(
                    solved ? "train_lm: no acceptable step before damping limit"
                           : "train_lm: normal equations singular at damping limit",
                    report, net);
            }
            mu *= config.mu_factor;
        }

        if (current_mse <= config.mse_goal) {
            report.converged = true;
            report.stop_reason = StopReason::GoalReached;
            return {std::move(net), std::move(report)};
        }
    }
    return {std::move(net), std::move(report)};
}

// ---------------------------------------------------------------------------
// Cross-validated topology selection
// ---------------------------------------------------------------------------

struct CvScore {
    std::vector<int> layer_sizes;
    double mean_holdout_mse = 0.0;
};

struct CvResult {
    std::vector<int> best;
    std::vector<CvScore> scores;
};

namespace detail {
inline long hidden_units(const std::vector<int>& sizes) {
    long n = 0;
    for (std::size_t l = 1; l + 1 < sizes.size(); ++l) n += sizes[l];
    return n;
}
}  // namespace detail

/// Leave-one-out cross-validation over the pattern set: every candidate is
/// retrained once per held-out pattern and scored by the mean held-out MSE.
/// Ties go to the smaller hidden size.
inline CvResult cross_validate(RatioMethod method,
                               std::span<const std::vector<int>> candidates,
                               std::span<const TrainingPattern> patterns,
                               const TrainConfig& config = {}) {
    validate(config);
    if (candidates.empty())
        throw std::invalid_argument("cross_validate: no candidates");
    if (patterns.size() < 2)
        throw std::invalid_argument("cross_validate: need at least two patterns");
    const auto in_size = static_cast<int>(patterns[0].input.size());
    const auto out_size = static_cast<int>(patterns[0].target.size());
    for (const auto& c : candidates) {
        if (c.size() < 3 || c.front() != in_size || c.back() != out_size)
            throw std::invalid_argument(
                "cross_validate: candidate layer sizes do not match pattern arity");
    }

    CvResult result;
    for (const auto& candidate : candidates) {
        double total = 0.0;
        for (std::size_t held = 0; held < patterns.size(); ++held) {
            std::vector<TrainingPattern> fold;
            fold.reserve(patterns.size() - 1);
            for (std::size_t i = 0; i < patterns.size(); ++i)
                if (i != held) fold.push_back(patterns[i]);
            MlpNetwork net = init_network(method, candidate, config.seed);
            MlpNetwork trained;
            try {
                trained = train_lm(std::move(net), fold, config).first;
            } catch (const TrainingFailure& failure) {
                trained = failure.net;  // plateaued fold still scores
            }
            total += mse(trained, std::span<const TrainingPattern>(&patterns[held], 1));
        }
        result.scores.push_back({candidate, total / static_cast<double>(patterns.size())});
    }

    const CvScore* best = &result.scores.front();
    for (const auto& s : result.scores) {
        if (s.mean_holdout_mse < best->mean_holdout_mse ||
            (s.mean_holdout_mse == best->mean_holdout_mse &&
             detail::hidden_units(s.layer_sizes) < detail::hidden_units(best->layer_sizes)))
            best = &s;
    }
    result.best = best->layer_sizes;
    return result;
}

}  // namespace dga
