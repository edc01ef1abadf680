#include <gtest/gtest.h>

#include <cmath>

#include "gradcheck.hpp"
#include "godm/numerics/adam.hpp"
#include "godm/numerics/rng.hpp"
#include "godm/numerics/tensor.hpp"

using namespace godm;
using godm::testing::grad_check;

namespace {

Tensor random_param(Rng& rng, std::size_t r, std::size_t c, const char* name) {
    std::vector<double> v(r * c);
    for (auto& x : v) x = rng.normal();
    return Tensor::parameter({r, c}, std::move(v), name);
}

}  // namespace

TEST(Ops, SigmoidOfZeroIsHalf) { EXPECT_DOUBLE_EQ(ops::sigmoid(Tensor::scalar(0.0)).item(), 0.5); }

TEST(Ops, SoftmaxOfEqualLogitsIsUniform) {
    const Tensor p = ops::softmax_rows(Tensor::full({2, 5}, 3.0));
    for (double v : p.data()) EXPECT_NEAR(v, 0.2, 1e-15);
}

TEST(Ops, SoftmaxRowsSumToOne) {
    Rng rng(3);
    const Tensor p = ops::softmax_rows(ops::scale(gaussian(rng, {20, 7}), 10.0));
    for (std::size_t r = 0; r < 20; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < 7; ++c) s += p.at(r, c);
        EXPECT_NEAR(s, 1.0, 1e-9);
    }
}

TEST(Ops, SigmoidStaysInOpenInterval) {
    const Tensor s = ops::sigmoid(Tensor::from({1, 4}, {-50.0, -5.0, 5.0, 30.0}));
    for (double v : s.data()) {
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, 1.0);
    }
}

TEST(Ops, SegmentMeanOfEmptySegmentIsZero) {
    const Tensor a = Tensor::from({2, 2}, {1, 2, 3, 4});
    const Tensor m = ops::segment_mean(a, {0, 0}, 3);
    EXPECT_DOUBLE_EQ(m.at(0, 0), 2.0);
    EXPECT_DOUBLE_EQ(m.at(0, 1), 3.0);
    for (std::size_t r = 1; r < 3; ++r)
        for (std::size_t c = 0; c < 2; ++c) EXPECT_EQ(m.at(r, c), 0.0);
}

TEST(Ops, ShapeMismatchNamesOperation) {
    try {
        ops::matmul(Tensor::zeros({2, 3}), Tensor::zeros({2, 3}));
        FAIL();
    } catch (const ShapeError& e) {
        EXPECT_NE(std::string(e.what()).find("matmul"), std::string::npos);
    }
}

TEST(Ops, BceClampsProbabilities) {
    const double v = ops::binary_cross_entropy(Tensor::from({2, 1}, {0.0, 1.0}), {1.0, 0.0}).item();
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_NEAR(v, -std::log(kProbClamp), 1e-4);
}

TEST(Backward, LinearMapGradientIsBroadcastInput) {
    const Tensor x = Tensor::from({1, 3}, {1.0, -2.0, 0.5});
    Tensor w = Tensor::parameter({2, 3}, std::vector<double>(6, 0.3), "w");
    backward(ops::sum(ops::linear(x, w)));
    const auto g = w.grad();
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(g[r * 3 + c], x.at(0, c));
}

TEST(Backward, MseOfIdenticalInputsHasZeroGradient) {
    Tensor a = Tensor::parameter({2, 2}, {1, 2, 3, 4}, "a");
    backward(ops::mse(a, a));
    for (double g : a.grad()) EXPECT_EQ(g, 0.0);
}

TEST(Backward, RejectsNonScalarAndSecondCall) {
    Tensor a = Tensor::parameter({2, 2}, {1, 2, 3, 4}, "a");
    EXPECT_THROW(backward(ops::scale(a, 2.0)), ShapeError);
    const Tensor loss = ops::sum(ops::square(a));
    backward(loss);
    EXPECT_THROW(backward(loss), Error);
}

TEST(Backward, MultilayerPerceptronMatchesFiniteDifferences) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        const Tensor x = gaussian(rng, {4, 2});
        Tensor w1 = random_param(rng, 3, 2, "w1");
        Tensor w2 = random_param(rng, 2, 3, "w2");
        Tensor w3 = random_param(rng, 1, 2, "w3");
        Tensor b = random_param(rng, 1, 1, "b");
        const std::vector<double> target{1, 0, 1, 0};
        auto f = [&] {
            Tensor h = ops::relu(ops::linear(x, w1));
            h = ops::sigmoid(ops::linear(h, w2));
            return ops::binary_cross_entropy(ops::sigmoid(ops::add_row(ops::linear(h, w3), b)), target);
        };
        const auto r = grad_check(f, {w1, w2, w3, b});
        EXPECT_EQ(r.entries, 6u + 6u + 2u + 1u);
        EXPECT_LT(r.rel_error, 1e-4) << "seed " << seed;
    }
}

TEST(Backward, EveryOpMatchesFiniteDifferences) {
    Rng rng(11);
    Tensor a = random_param(rng, 3, 4, "a");
    Tensor b = random_param(rng, 3, 4, "b");
    Tensor row = random_param(rng, 1, 4, "row");
    Tensor m = random_param(rng, 4, 2, "m");
    Tensor pos = Tensor::parameter({3, 4}, std::vector<double>(12, 0.7), "pos");
    const std::vector<std::pair<const char*, std::function<Tensor()>>> cases = {
        {"matmul", [&] { return ops::sum(ops::matmul(a, m)); }},
        {"add_sub_mul", [&] { return ops::sum(ops::mul(ops::add(a, b), ops::sub(a, b))); }},
        {"add_row", [&] { return ops::sum(ops::square(ops::add_row(a, row))); }},
        {"transpose", [&] { return ops::sum(ops::matmul(ops::transpose(a), b)); }},
        {"exp_log", [&] { return ops::sum(ops::log(ops::add_scalar(ops::exp(a), 1.0))); }},
        {"sin_cos", [&] { return ops::sum(ops::mul(ops::sin(a), ops::cos(b))); }},
        {"concat", [&] { return ops::sum(ops::square(ops::concat_cols(a, b))); }},
        {"gather", [&] { return ops::sum(ops::square(ops::gather_rows(a, {2, 0, 2}))); }},
        {"segment_mean", [&] { return ops::sum(ops::square(ops::segment_mean(a, {1, 1, 0}, 3))); }},
        {"softmax_ce", [&] { return ops::cross_entropy(ops::softmax_rows(a), {0, 3, 1}); }},
        {"bce", [&] { return ops::binary_cross_entropy(ops::sigmoid(ops::matmul(a, m)), {1, 0, 0, 1, 1, 0}); }},
        {"mse_mean", [&] { return ops::add(ops::mse(a, b), ops::mean(ops::square(a))); }},
        {"log_positive", [&] { return ops::sum(ops::log(pos)); }},
    };
    for (const auto& [name, f] : cases) {
        const auto r = grad_check(f, {a, b, row, m, pos});
        EXPECT_LT(r.rel_error, 1e-4) << name;
    }
}

TEST(Adam, FirstStepMovesByLearningRate) {
    std::vector<Tensor> p{Tensor::parameter({1, 1}, {0.5}, "p")};
    AdamState st({0.001}, p);
    const std::vector<double> g{1.0};
    const std::vector<std::span<const double>> grads{g};
    adam_step(st, std::span<Tensor>(p), std::span<const std::span<const double>>(grads));
    EXPECT_NEAR(0.5 - p[0].item(), 0.001 / (1.0 + 1e-8), 1e-15);
    EXPECT_EQ(st.step, 1u);
}

TEST(Adam, ZeroGradientLeavesParameters) {
    std::vector<Tensor> p{Tensor::parameter({1, 2}, {0.5, -1.0}, "p")};
    AdamState st({0.01}, p);
    st.m[0] = {0.2, 0.4};
    st.v[0] = {0.1, 0.1};
    const std::vector<double> g{0.0, 0.0};
    const std::vector<std::span<const double>> grads{g};
    adam_step(st, std::span<Tensor>(p), std::span<const std::span<const double>>(grads));
    EXPECT_NEAR(st.m[0][0], 0.18, 1e-15);
    EXPECT_NEAR(st.v[0][0], 0.0999, 1e-15);
    EXPECT_NE(p[0].at(0, 0), 0.5);  // stale momentum still moves the parameter
    std::vector<Tensor> q{Tensor::parameter({1, 2}, {0.5, -1.0}, "q")};
    AdamState fresh({0.01}, q);
    adam_step(fresh, std::span<Tensor>(q), std::span<const std::span<const double>>(grads));
    EXPECT_EQ(q[0].at(0, 0), 0.5);
    EXPECT_EQ(q[0].at(0, 1), -1.0);
}

TEST(Adam, TwoStepsWithConstantGradientMatchHandValues) {
    std::vector<Tensor> p{Tensor::parameter({1, 1}, {1.0}, "p")};
    AdamState st({0.001}, p);
    const std::vector<double> g{2.0};
    const std::vector<std::span<const double>> grads{g};
    adam_step(st, std::span<Tensor>(p), std::span<const std::span<const double>>(grads));
    EXPECT_NEAR(st.m[0][0], 0.2, 1e-15);
    EXPECT_NEAR(st.v[0][0], 0.004, 1e-15);
    adam_step(st, std::span<Tensor>(p), std::span<const std::span<const double>>(grads));
    EXPECT_NEAR(st.m[0][0], 0.38, 1e-15);
    EXPECT_NEAR(st.v[0][0], 0.007996, 1e-15);
    // m̂ = 0.38 / 0.19 = 2, v̂ = 0.007996 / 0.001999 = 4 on both steps
    EXPECT_NEAR(p[0].item(), 1.0 - 2.0 * 0.001 * 2.0 / (2.0 + 1e-8), 1e-12);
}

TEST(Adam, NanGradientNamesParameter) {
    std::vector<Tensor> p{Tensor::parameter({1, 1}, {1.0}, "encoder.w")};
    AdamState st({0.001}, p);
    const std::vector<double> g{std::nan("")};
    const std::vector<std::span<const double>> grads{g};
    try {
        adam_step(st, std::span<Tensor>(p), std::span<const std::span<const double>>(grads));
        FAIL();
    } catch (const NumericError& e) {
        EXPECT_NE(std::string(e.what()).find("encoder.w"), std::string::npos);
    }
}

TEST(Adam, ClearsGradientsAfterStep) {
    std::vector<Tensor> p{Tensor::parameter({1, 2}, {1.0, 2.0}, "p")};
    AdamState st({0.1}, p);
    backward(ops::sum(ops::square(p[0])));
    adam_step(st, p);
    EXPECT_FALSE(p[0].has_grad());
    EXPECT_LT(p[0].at(0, 0), 1.0);
}

TEST(Gaussian, MomentsMatchStandardNormal) {
    Rng rng(42);
    const Tensor t = gaussian(rng, {100000, 1});
    double s = 0.0, s2 = 0.0;
    for (double v : t.data()) {
        s += v;
        s2 += v * v;
    }
    const double mean = s / 1e5;
    EXPECT_NEAR(mean, 0.0, 0.02);
    EXPECT_NEAR(s2 / 1e5 - mean * mean, 1.0, 0.05);
}

TEST(Gaussian, SeedDeterminesStream) {
    Rng a(7), b(7), c(8);
    const Tensor x = gaussian(a, {10, 3}), y = gaussian(b, {10, 3}), z = gaussian(c, {10, 3});
    EXPECT_EQ(x.values(), y.values());
    EXPECT_NE(x.values(), z.values());
    EXPECT_THROW(gaussian(a, {}), ShapeError);
}

TEST(Rng, DeriveIsIndependentOfParentPosition) {
    Rng a(5);
    const Rng d1 = a.derive(3);
    a.normal();
    Rng d2 = a.derive(3);
    Rng d1c = d1;
    EXPECT_EQ(d1c.normal(), d2.normal());
    EXPECT_NE(Rng(5).derive(3).uniform(), Rng(5).derive(4).uniform());
}
