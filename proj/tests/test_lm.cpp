#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dga/data.hpp"
#include "dga/lm.hpp"

using namespace dga;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<TrainingPattern> random_patterns(int n, int in_size, int out_size,
                                             unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> in_dist(0.0, 5.0);
    std::uniform_int_distribution<int> cls(0, out_size - 1);
    std::vector<TrainingPattern> ps(n);
    for (auto& p : ps) {
        p.input.resize(in_size);
        for (double& x : p.input) x = in_dist(gen);
        p.target.assign(out_size, 0.0);
        p.target[cls(gen)] = 1.0;
    }
    return ps;
}

/// Central finite-difference Jacobian, the oracle the analytic one is
/// checked against.
Matrix fd_jacobian(const MlpNetwork& net, std::span<const TrainingPattern> patterns,
                   double step) {
    const auto params = pack_parameters(net);
    const auto n_out = static_cast<std::size_t>(net.output_size());
    Matrix jac(patterns.size() * n_out, params.size());
    for (std::size_t c = 0; c < params.size(); ++c) {
        auto plus = params, minus = params;
        plus[c] += step;
        minus[c] -= step;
        MlpNetwork np = net, nm = net;
        unpack_parameters(np, plus);
        unpack_parameters(nm, minus);
        for (std::size_t p = 0; p < patterns.size(); ++p) {
            const auto op = forward(np, patterns[p].input);
            const auto om = forward(nm, patterns[p].input);
            for (std::size_t k = 0; k < n_out; ++k)
                jac.at(p * n_out + k, c) = (op[k] - om[k]) / (2.0 * step);
        }
    }
    return jac;
}

double max_relative_deviation(const Matrix& a, const Matrix& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double denom = std::max({1.0, std::abs(a.data[i]), std::abs(b.data[i])});
        worst = std::max(worst, std::abs(a.data[i] - b.data[i]) / denom);
    }
    return worst;
}

}  // namespace

TEST_CASE("mse") {
    SECTION("zero residual") {
        auto net = init_network(RatioMethod::Iec, {1, 1, 1}, 1);
        const std::vector<double> input{0.0};
        const std::vector<TrainingPattern> exact{{input, {forward(net, input)[0]}}};
        CHECK_THAT(mse(net, exact), WithinAbs(0.0, 1e-15));
    }
    SECTION("single unit, output 0 vs target 1") {
        auto net = init_network(RatioMethod::Iec, {1, 1, 1}, 1);
        for (auto& l : net.weights) std::fill(l.begin(), l.end(), 0.0);
        for (auto& l : net.biases) std::fill(l.begin(), l.end(), 0.0);
        const std::vector<TrainingPattern> ps{{{0.0}, {1.0}}};
        CHECK(mse(net, ps) == 1.0);
    }
    SECTION("invariant under pattern reordering") {
        const auto net = init_network(RatioMethod::Iec, {3, 5, 9}, 4);
        auto ps = random_patterns(8, 3, 9, 17);
        const double before = mse(net, ps);
        std::reverse(ps.begin(), ps.end());
        CHECK(mse(net, ps) == before);
    }
    SECTION("arity mismatch") {
        const auto net = init_network(RatioMethod::Iec, {3, 5, 9}, 4);
        const auto bad = random_patterns(2, 4, 9, 3);
        CHECK_THROWS_AS(mse(net, bad), std::invalid_argument);
        const std::vector<TrainingPattern> empty;
        CHECK_THROWS_AS(mse(net, empty), std::invalid_argument);
    }
}

TEST_CASE("jacobian") {
    SECTION("dimensions") {
        const auto net = init_network(RatioMethod::Iec, {3, 5, 9}, 2);
        const auto ps = random_patterns(7, 3, 9, 23);
        const auto jac = jacobian(net, ps);
        CHECK(jac.rows == 7 * 9);
        CHECK(jac.cols == (3 + 1) * 5 + (5 + 1) * 9);
        CHECK(jac.cols == parameter_count(net));
    }
    SECTION("matches central finite differences") {
        const auto ps = random_patterns(6, 3, 9, 31);
        for (unsigned seed : {1u, 2u, 3u}) {
            const auto net = init_network(RatioMethod::Iec, {3, 5, 9}, seed);
            const auto analytic = jacobian(net, ps);
            const auto numeric = fd_jacobian(net, ps, 1e-6);
            CHECK(max_relative_deviation(analytic, numeric) <= 1e-5);
        }
    }
    SECTION("zero-input pattern zeroes first-layer weight columns") {
        const auto net = init_network(RatioMethod::Iec, {3, 4, 9}, 6);
        const std::vector<TrainingPattern> ps{
            {{0.0, 0.0, 0.0}, {1, 0, 0, 0, 0, 0, 0, 0, 0}}};
        const auto jac = jacobian(net, ps);
        for (std::size_t r = 0; r < jac.rows; ++r)
            for (std::size_t c = 0; c < 3 * 4; ++c) CHECK(jac.at(r, c) == 0.0);
    }
    SECTION("J'e equals half the gradient of the squared error sum") {
        for (unsigned seed : {11u, 12u, 13u}) {
            const auto net = init_network(RatioMethod::Iec, {3, 4, 9}, seed);
            const auto ps = random_patterns(5, 3, 9, seed + 100);
            const auto jac = jacobian(net, ps);
            const auto e = detail::residuals(net, ps);
            std::vector<double> jte(jac.cols, 0.0);
            for (std::size_t r = 0; r < jac.rows; ++r)
                for (std::size_t c = 0; c < jac.cols; ++c)
                    jte[c] += jac.at(r, c) * e[r];

            // numeric gradient of sum of squared errors
            const auto params = pack_parameters(net);
            const double h = 1e-6;
            for (std::size_t c = 0; c < params.size(); ++c) {
                auto plus = params, minus = params;
                plus[c] += h;
                minus[c] -= h;
                MlpNetwork np = net, nm = net;
                unpack_parameters(np, plus);
                unpack_parameters(nm, minus);
                auto sse = [&](const MlpNetwork& n) {
                    const auto res = detail::residuals(n, ps);
                    double s = 0.0;
                    for (double v : res) s += v * v;
                    return s;
                };
                const double grad = (sse(np) - sse(nm)) / (2.0 * h);
                const double denom = std::max({1.0, std::abs(jte[c]), std::abs(grad / 2.0)});
                CHECK(std::abs(jte[c] - grad / 2.0) / denom <= 1e-5);
            }
        }
    }
}

TEST_CASE("train_lm") {
    SECTION("iec pattern set reaches the goal, seed 42, (3,10,9)") {
        const auto patterns = iec_training_set();
        auto net = init_network(RatioMethod::Iec, {3, 10, 9}, 42);
        const auto [trained, report] = train_lm(std::move(net), patterns);
        CHECK(report.converged);
        CHECK(report.final_mse <= 1e-3);
        CHECK(report.epochs <= 1000);
    }
    SECTION("rogers pattern set reaches the goal, seed 42, (4,12,12)") {
        const auto patterns = rogers_training_set();
        auto net = init_network(RatioMethod::Rogers, {4, 12, 12}, 42);
        const auto [trained, report] = train_lm(std::move(net), patterns);
        CHECK(report.converged);
        CHECK(report.final_mse <= 1e-3);
    }
    SECTION("already-converged net returns immediately with zero steps") {
        const auto patterns = iec_training_set();
        auto net = init_network(RatioMethod::Iec, {3, 10, 9}, 42);
        auto trained = train_lm(std::move(net), patterns).first;
        const auto [again, report] = train_lm(trained, patterns);
        CHECK(report.epochs == 0);
        CHECK(report.converged);
        CHECK(report.history.size() == 1);
        CHECK(again == trained);
    }
    SECTION("history is non-increasing across accepted steps") {
        const auto patterns = rogers_training_set();
        auto net = init_network(RatioMethod::Rogers, {4, 12, 12}, 7);
        const auto report = train_lm(std::move(net), patterns).second;
        REQUIRE(report.history.size() >= 2);
        for (std::size_t i = 1; i < report.history.size(); ++i)
            CHECK(report.history[i] <= report.history[i - 1]);
        CHECK(report.final_mse == report.history.back());
    }
    SECTION("bit-for-bit deterministic") {
        const auto patterns = iec_training_set();
        const auto a = train_lm(init_network(RatioMethod::Iec, {3, 10, 9}, 42), patterns);
        const auto b = train_lm(init_network(RatioMethod::Iec, {3, 10, 9}, 42), patterns);
        CHECK(a.first == b.first);
        CHECK(a.second.history == b.second.history);
    }
    SECTION("damping overflow raises with the partial report intact") {
        // two identical inputs with contradictory targets and a start at the
        // exact least-squares optimum: every proposed step is a zero step, so
        // nothing can be accepted and mu climbs past the limit
        auto net = init_network(RatioMethod::Iec, {1, 1, 1}, 1);
        for (auto& l : net.weights) std::fill(l.begin(), l.end(), 0.0);
        net.biases[0][0] = 0.0;
        net.biases[1][0] = 0.5;
        const std::vector<TrainingPattern> ps{{{0.0}, {0.0}}, {{0.0}, {1.0}}};
        REQUIRE(mse(net, ps) == 0.25);
        TrainConfig config;
        config.max_epochs = 50;
        bool raised = false;
        try {
            train_lm(net, ps, config);
        } catch (const TrainingFailure& failure) {
            raised = true;
            CHECK(failure.report.epochs == 0);
            CHECK(failure.report.history == std::vector<double>{0.25});
            CHECK(failure.report.final_mse == 0.25);
            CHECK_FALSE(failure.report.converged);
            CHECK(failure.report.stop_reason == StopReason::MuOverflow);
            CHECK(failure.net == net);
        }
        CHECK(raised);
    }
    SECTION("invalid config rejected") {
        const auto patterns = iec_training_set();
        TrainConfig bad;
        bad.mu_factor = 1.0;
        CHECK_THROWS_AS(
            train_lm(init_network(RatioMethod::Iec, {3, 5, 9}, 1), patterns, bad),
            std::invalid_argument);
    }
}

TEST_CASE("cross_validate") {
    TrainConfig quick;
    quick.max_epochs = 150;

    SECTION("single candidate wins trivially") {
        const auto patterns = iec_training_set();
        const std::vector<std::vector<int>> candidates{{3, 6, 9}};
        const auto cv = cross_validate(RatioMethod::Iec, candidates, patterns, quick);
        CHECK(cv.best == candidates[0]);
        REQUIRE(cv.scores.size() == 1);
        CHECK(std::isfinite(cv.scores[0].mean_holdout_mse));
    }
    SECTION("duplicate candidates score equally; report lists all") {
        const auto patterns = iec_training_set();
        const std::vector<std::vector<int>> candidates{{3, 5, 9}, {3, 5, 9}};
        const auto cv = cross_validate(RatioMethod::Iec, candidates, patterns, quick);
        REQUIRE(cv.scores.size() == 2);
        CHECK(cv.scores[0].mean_holdout_mse == cv.scores[1].mean_holdout_mse);
    }
    SECTION("four hidden-size candidates all score, winner among them") {
        const auto patterns = iec_training_set();
        std::vector<std::vector<int>> candidates;
        for (int h : {5, 10, 15, 20}) candidates.push_back({3, h, 9});
        TrainConfig fast = quick;
        fast.max_epochs = 60;
        const auto cv = cross_validate(RatioMethod::Iec, candidates, patterns, fast);
        REQUIRE(cv.scores.size() == 4);
        for (const auto& s : cv.scores) CHECK(std::isfinite(s.mean_holdout_mse));
        CHECK(std::find(candidates.begin(), candidates.end(), cv.best) != candidates.end());
    }
    SECTION("candidate arity mismatch rejected") {
        const auto patterns = iec_training_set();
        const std::vector<std::vector<int>> bad{{4, 5, 9}};
        CHECK_THROWS_AS(cross_validate(RatioMethod::Iec, bad, patterns, quick),
                        std::invalid_argument);
        const std::vector<std::vector<int>> none;
        CHECK_THROWS_AS(cross_validate(RatioMethod::Iec, none, patterns, quick),
                        std::invalid_argument);
    }
}
