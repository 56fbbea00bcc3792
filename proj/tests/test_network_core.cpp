#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "test_support.hpp"

using namespace foldscope;
using namespace foldscope::testing;

TEST(LoadModel, SmallestValidModel) {
    std::istringstream doc(R"({"input_dim": 1, "layers": [
        {"weights": [[1], [1]], "bias": [0, -0.5], "activation": "relu"},
        {"weights": [[1, -1]], "bias": [0], "activation": "identity"}]})");
    const Mlp net = load_model(doc);
    EXPECT_EQ(net.input_dim(), 1u);
    EXPECT_EQ(net.total_hidden(), 2u);
    EXPECT_TRUE(net.layers().back().is_output);
    EXPECT_FALSE(net.layers().front().is_output);
}

TEST(LoadModel, BiasLengthMismatchNamesLayer) {
    const std::string doc = R"({"input_dim": 1, "layers": [
        {"weights": [[1], [1]], "bias": [0], "activation": "relu"},
        {"weights": [[1, 1]], "bias": [0], "activation": "identity"}]})";
    try {
        parse_model(doc);
        FAIL() << "expected ModelError";
    } catch (const ModelError& e) {
        EXPECT_EQ(e.reason(), ModelError::Reason::DimensionMismatch);
        ASSERT_TRUE(e.layer().has_value());
        EXPECT_EQ(*e.layer(), 0u);
        EXPECT_NE(std::string(e.what()).find("layer 0"), std::string::npos);
    }
}

TEST(LoadModel, NaNWeightIsNonFinite) {
    const std::string doc = R"({"input_dim": 1, "layers": [
        {"weights": [[1], [1]], "bias": [0, 0], "activation": "relu"},
        {"weights": [[NaN, 1]], "bias": [0], "activation": "identity"}]})";
    try {
        parse_model(doc);
        FAIL() << "expected ModelError";
    } catch (const ModelError& e) {
        EXPECT_EQ(e.reason(), ModelError::Reason::NonFinite);
        EXPECT_EQ(e.layer(), std::optional<std::size_t>(1));
    }
}

TEST(LoadModel, OverflowingNumberIsNonFinite) {
    const std::string doc = R"({"input_dim": 1, "layers": [
        {"weights": [[1e999]], "bias": [0], "activation": "identity"}]})";
    EXPECT_THROW(
        {
            try {
                parse_model(doc);
            } catch (const ModelError& e) {
                EXPECT_EQ(e.reason(), ModelError::Reason::NonFinite);
                throw;
            }
        },
        ModelError);
}

TEST(LoadModel, MalformedDocuments) {
    EXPECT_THROW(parse_model("{"), ModelError);
    EXPECT_THROW(parse_model(R"({"input_dim": 1})"), ModelError);
    EXPECT_THROW(parse_model(R"({"input_dim": 0, "layers": [{"weights": [[1]], "bias": [0], "activation": "relu"}]})"),
                 ModelError);
    EXPECT_THROW(parse_model(R"({"input_dim": 1, "layers": [{"weights": [[1]], "bias": [0], "activation": "swiglu"}]})"),
                 ModelError);
    // consecutive layers that do not compose
    EXPECT_THROW(parse_model(R"({"input_dim": 1, "layers": [
        {"weights": [[1], [1]], "bias": [0, 0], "activation": "relu"},
        {"weights": [[1, 1, 1]], "bias": [0], "activation": "identity"}]})"),
                 ModelError);
}

TEST(LoadModel, SaveThenLoadIsByteStable) {
    Rng rng(11);
    const Mlp net = random_net(rng, {3, 5, 4, 2}, ActivationKind::GELU);
    const std::string once = serialize_model(net);
    const Mlp back = parse_model(once);
    EXPECT_EQ(back, net);
    EXPECT_EQ(serialize_model(back), once);
}

TEST(ApplyActivation, PointValues) {
    EXPECT_EQ(apply_activation(ActivationKind::ReLU, -2.0), 0.0);
    EXPECT_EQ(apply_activation(ActivationKind::ReLU, 3.5), 3.5);
    for (auto k : {ActivationKind::ReLU, ActivationKind::GELU, ActivationKind::SiLU, ActivationKind::Tanh,
                   ActivationKind::Identity}) {
        EXPECT_EQ(apply_activation(k, 0.0), 0.0) << activation_name(k);
    }
}

TEST(ApplyActivation, GeluIsExactErfForm) {
    // x * Phi(x) with Phi from erf; the tanh approximation differs at ~1e-4 here.
    const double x = 1.0;
    const double exact = x * 0.5 * (1.0 + std::erf(x / std::sqrt(2.0)));
    EXPECT_NEAR(apply_activation(ActivationKind::GELU, x), exact, 1e-15);
    const double tanh_approx = 0.5 * x * (1.0 + std::tanh(std::sqrt(2.0 / std::numbers::pi) * (x + 0.044715 * x * x * x)));
    EXPECT_GT(std::abs(apply_activation(ActivationKind::GELU, x) - tanh_approx), 1e-5);
}

TEST(ApplyActivation, DerivativesMatchFiniteDifferences) {
    for (auto k : {ActivationKind::GELU, ActivationKind::SiLU, ActivationKind::Tanh, ActivationKind::Identity,
                   ActivationKind::ReLU}) {
        for (double v : {-2.3, -0.7, 0.4, 1.9}) {
            const double h = 1e-6;
            const double fd = (apply_activation(k, v + h) - apply_activation(k, v - h)) / (2 * h);
            EXPECT_NEAR(activation_derivative(k, v), fd, 1e-8) << activation_name(k) << " at " << v;
        }
    }
}

TEST(Forward, HandEvaluatedTwoNeuronNet) {
    const Mlp net = two_neuron_net();
    const std::vector<double> x{0.75};
    const auto r = forward(net, x);
    ASSERT_EQ(r.hidden.size(), 1u);
    EXPECT_DOUBLE_EQ(r.hidden[0][0], 0.75);
    EXPECT_DOUBLE_EQ(r.hidden[0][1], 0.25);
    EXPECT_DOUBLE_EQ(r.output[0], 0.5);

    const std::vector<double> neg{-1.0};
    const auto r2 = forward(net, neg);
    EXPECT_EQ(r2.hidden[0][0], 0.0);
    EXPECT_EQ(r2.hidden[0][1], 0.0);
}

TEST(Forward, IdentityLayerPassesThrough) {
    const Mlp net(3, {dense({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {0, 0, 0}, ActivationKind::Identity)});
    const std::vector<double> x{0.1, -2.0, 7.5};
    EXPECT_EQ(forward(net, x).output, x);
}

TEST(Forward, DimensionMismatch) {
    const Mlp net = two_neuron_net();
    const std::vector<double> x{1.0, 2.0};
    EXPECT_THROW(forward(net, x), DimensionError);
    EXPECT_THROW(activation_pattern(net, x), DimensionError);
}

TEST(ActivationPatternTest, HandEvaluated) {
    const Mlp net = two_neuron_net();
    EXPECT_EQ(activation_pattern(net, std::vector<double>{0.75}).to_string(), "11");
    EXPECT_EQ(activation_pattern(net, std::vector<double>{-1.0}).to_string(), "00");
    EXPECT_EQ(activation_pattern(net, std::vector<double>{0.25}).to_string(), "10");
    // exact zero is not strictly positive
    EXPECT_EQ(activation_pattern(net, std::vector<double>{0.5}).to_string(), "10");
    EXPECT_EQ(activation_pattern(net, std::vector<double>{0.0}).to_string(), "00");
}

TEST(ActivationPatternTest, ConcatenatesLayersInOrder) {
    const Mlp net = fold_fixture_net();
    EXPECT_EQ(net.total_hidden(), 3u);
    EXPECT_EQ(activation_pattern(net, std::vector<double>{0.5}).to_string(), "000");
    EXPECT_EQ(activation_pattern(net, std::vector<double>{1.5}).to_string(), "010");
    EXPECT_EQ(activation_pattern(net, std::vector<double>{2.5}).to_string(), "111");
    EXPECT_EQ(activation_pattern(net, std::vector<double>{3.5}).to_string(), "110");
}

TEST(ActivationPatternTest, PreAndPostActivationSignsAgree) {
    Rng rng(2024);
    for (int trial = 0; trial < 40; ++trial) {
        for (auto act : {ActivationKind::ReLU, ActivationKind::GELU, ActivationKind::SiLU, ActivationKind::Tanh}) {
            const Mlp net = random_net(rng, {3, 6, 5, 2}, act);
            for (int i = 0; i < 20; ++i) {
                const auto x = random_point(rng, 3, 2.0);
                EXPECT_EQ(activation_pattern(net, x), preactivation_pattern(net, x));
            }
        }
    }
}

TEST(ActivationPatternTest, PureFunction) {
    Rng rng(5);
    const Mlp net = random_net(rng, {2, 16, 16, 2});
    const auto x = random_point(rng, 2);
    const auto p = activation_pattern(net, x);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(activation_pattern(net, x), p);
}

TEST(Hamming, Examples) {
    EXPECT_EQ(hamming(P("000"), P("000")), 0u);
    EXPECT_EQ(hamming(P("000"), P("111")), 3u);
    EXPECT_EQ(hamming(P("111"), P("100")), 2u);
    EXPECT_THROW(hamming(P("00"), P("000")), DimensionError);
}

TEST(Hamming, MetricAndEquivalenceProperties) {
    Rng rng(99);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng.below(130);  // crosses word boundaries
        const auto a = random_pattern(rng, n);
        const auto b = random_pattern(rng, n);
        const auto c = random_pattern(rng, n);
        EXPECT_EQ(hamming(a, b), hamming(b, a));
        EXPECT_EQ(hamming(a, a), 0u);
        EXPECT_EQ(hamming(a, b) == 0, a == b);
        EXPECT_LE(hamming(a, c), hamming(a, b) + hamming(b, c));
        // equivalence: zero distance is transitive
        if (hamming(a, b) == 0 && hamming(b, c) == 0) {
            EXPECT_EQ(hamming(a, c), 0u);
        }
    }
}

TEST(Hamming, EqualsBruteForceCount) {
    Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(200);
        const auto a = random_pattern(rng, n);
        const auto b = random_pattern(rng, n);
        const auto sa = a.to_string();
        const auto sb = b.to_string();
        std::size_t d = 0;
        for (std::size_t i = 0; i < n; ++i) d += sa[i] != sb[i];
        EXPECT_EQ(hamming(a, b), d);
        EXPECT_EQ(ActivationPattern::from_string(sa), a);
    }
}
