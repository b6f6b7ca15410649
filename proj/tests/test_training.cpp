#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hcsa/training.hpp"
#include "test_util.hpp"

using namespace hcsa;
using hcsa_test::micro_config;
using hcsa_test::random_tensor;

namespace {

// Small learnable setup for optimizer tests: a single named parameter.
ModelParams single_param(std::vector<double> values) {
    ModelParams p;
    p.cfg = micro_config();
    const std::size_t n = values.size();
    p.add("w", Tensor::from_data({n}, std::move(values)));
    return p;
}

std::vector<data::Sample> tiny_dataset(std::size_t count, std::uint64_t seed) {
    data::SyntheticTaskConfig synth;
    synth.sequence_length = 24;
    synth.feature_dim = 8;
    synth.event_types = 3;
    synth.events_per_sequence = 2;
    synth.noise_sigma = 0.1;
    synth.seed = seed;
    return data::generate_synthetic_dataset(synth, count);
}

HCSAConfig tiny_model_config(std::uint64_t seed) {
    HCSAConfig cfg;
    cfg.layers = 2;
    cfg.segment_factor = 4;
    cfg.decoder_layers = 1;
    cfg.kernel_width = 3;
    cfg.hidden_dim = 16;
    cfg.question_gru_dim = 8;
    cfg.video_feature_dim = 8;
    cfg.question_vocab = data::question_vocab().size();
    cfg.answer_vocab = data::answer_vocab().size();
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST(MleLoss, PerfectLogitsApproachZero) {
    Tensor logits = Tensor::from_data({2, 4}, {40, 0, 0, 0, 0, 0, 40, 0});
    const double loss = train::mle_loss({logits}, {{0, 2}}).item();
    EXPECT_LT(loss, 1e-9);
}

TEST(MleLoss, UniformLogits) {
    const double loss = train::mle_loss({Tensor::zeros({2, 10})}, {{1, 9}}).item();
    EXPECT_NEAR(loss, 2.0 * std::log(10.0), 1e-12);
}

TEST(MleLoss, PadPositionsMaskedOut) {
    const double loss = train::mle_loss({Tensor::zeros({3, 10})}, {{1, token::pad, 9}}).item();
    EXPECT_NEAR(loss, 2.0 * std::log(10.0), 1e-12);
}

TEST(MleLoss, BatchMeanMatchesByHand) {
    std::mt19937_64 rng(31);
    Tensor a = random_tensor({2, 5}, rng);
    Tensor b = random_tensor({1, 5}, rng);
    const std::vector<std::vector<int>> targets = {{1, 4}, {0}};
    const double loss = train::mle_loss({a, b}, targets).item();

    auto ce_row = [](const Tensor& logits, std::size_t row, int target) {
        long double mx = logits(row, 0);
        for (std::size_t j = 0; j < logits.cols(); ++j) {
            mx = std::max<long double>(mx, logits(row, j));
        }
        long double z = 0.0L;
        for (std::size_t j = 0; j < logits.cols(); ++j) {
            z += std::exp(static_cast<long double>(logits(row, j)) - mx);
        }
        return static_cast<double>(mx + std::log(z) -
                                   logits(row, static_cast<std::size_t>(target)));
    };
    const double expect = 0.5 * ((ce_row(a, 0, 1) + ce_row(a, 1, 4)) + ce_row(b, 0, 0));
    EXPECT_NEAR(loss, expect, 1e-10);
}

TEST(MleLoss, MisalignedLengthsThrow) {
    EXPECT_THROW(train::mle_loss({Tensor::zeros({2, 5})}, {{1}}), ShapeError);
    EXPECT_THROW(train::mle_loss({}, {}), ShapeError);
}

TEST(AdamStep, ZeroGradientLeavesParamsUnchanged) {
    ModelParams p = single_param({1.0, -2.0, 3.0});
    p.zero_grads();
    train::AdamState state = train::AdamState::for_params(p, 0.01);
    train::adam_step(p, state);
    EXPECT_EQ(p.get("w").values(), (std::vector<double>{1.0, -2.0, 3.0}));
}

TEST(AdamStep, FirstStepMatchesClosedForm) {
    // after one step: Δ = −lr·g / (|g| + ε)
    ModelParams p = single_param({0.5, 0.5, 0.5});
    Tensor w = p.get("w");
    w.grad() = {0.3, -1.7, 0.0};
    train::AdamState state = train::AdamState::for_params(p, 0.01);
    train::adam_step(p, state);
    const std::vector<double> g = {0.3, -1.7, 0.0};
    for (std::size_t i = 0; i < 3; ++i) {
        const double expect = 0.5 - 0.01 * g[i] / (std::abs(g[i]) + state.eps);
        EXPECT_NEAR(w.values()[i], expect, 1e-12);
    }
}

TEST(AdamStep, ReducesConvexQuadratic) {
    // f(w) = (w − 3)², gradient 2(w − 3)
    ModelParams p = single_param({0.0});
    train::AdamState state = train::AdamState::for_params(p, 0.1);
    auto loss = [&]() {
        const double w = p.get("w").values()[0];
        return (w - 3.0) * (w - 3.0);
    };
    const double initial = loss();
    for (int i = 0; i < 2; ++i) {
        const double w = p.get("w").values()[0];
        p.get("w").grad() = {2.0 * (w - 3.0)};
        train::adam_step(p, state);
    }
    EXPECT_LT(loss(), initial);
}

TEST(AdamStep, MissingGradThrows) {
    ModelParams p;
    p.cfg = micro_config();
    Tensor w = Tensor::from_data({2}, {1.0, 2.0});
    p.index["w"] = 0;
    p.named.emplace_back("w", w);  // never marked as requiring grad
    train::AdamState state = train::AdamState::for_params(p, 0.01);
    EXPECT_THROW(train::adam_step(p, state), Error);
}

TEST(ClipGradNorm, ScalesDownOnlyAboveThreshold) {
    ModelParams p = single_param({0.0, 0.0});
    p.get("w").grad() = {3.0, 4.0};  // norm 5
    const double norm = train::clip_grad_norm(p, 1.0);
    EXPECT_DOUBLE_EQ(norm, 5.0);
    EXPECT_NEAR(p.get("w").grad()[0], 0.6, 1e-12);
    EXPECT_NEAR(p.get("w").grad()[1], 0.8, 1e-12);
    p.get("w").grad() = {0.3, 0.4};
    train::clip_grad_norm(p, 1.0);
    EXPECT_NEAR(p.get("w").grad()[0], 0.3, 1e-12);
}

TEST(Train, EmptyDatasetThrows) {
    ModelParams p = build_model_params(tiny_model_config(1));
    train::TrainOptions opts;
    EXPECT_THROW(train::train(p, {}, opts), InputError);
}

TEST(Train, InitialLossNearUniformEntropy) {
    auto dataset = tiny_dataset(16, 5);
    ModelParams p = build_model_params(tiny_model_config(5));
    train::TrainOptions opts;
    opts.epochs = 1;
    opts.max_steps = 1;
    opts.batch_size = 8;
    train::TrainReport report = train::train(p, dataset, opts);
    ASSERT_EQ(report.steps(), 1u);
    // targets are (answer, EOS): r̄ = 2, so expect ≈ 2·ln(T) within 20%
    const double expect = 2.0 * std::log(static_cast<double>(p.cfg.answer_vocab));
    EXPECT_NEAR(report.step_losses[0], expect, 0.2 * expect);
}

TEST(Train, SameSeedGivesBitwiseIdenticalLossTrace) {
    auto dataset = tiny_dataset(16, 6);
    train::TrainOptions opts;
    opts.epochs = 2;
    opts.batch_size = 4;
    auto run = [&]() {
        ModelParams p = build_model_params(tiny_model_config(6));
        return train::train(p, dataset, opts).step_losses;
    };
    EXPECT_EQ(run(), run());  // bitwise
}

TEST(Train, LossesStayFiniteAndDecreaseOnTinyOverfit) {
    auto dataset = tiny_dataset(4, 7);
    ModelParams p = build_model_params(tiny_model_config(7));
    train::TrainOptions opts;
    opts.epochs = 100;
    opts.batch_size = 4;
    opts.max_steps = 100;
    train::TrainReport report = train::train(p, dataset, opts);
    for (double l : report.step_losses) EXPECT_TRUE(std::isfinite(l));
    EXPECT_LT(report.step_losses.back(), 0.5 * report.step_losses.front());
}

TEST(GradientCheck, MicroModelUnderFDThreshold) {
    HCSAConfig cfg = micro_config();
    cfg.seed = 3;
    ModelParams p = build_model_params(cfg);
    std::mt19937_64 rng(8);
    data::Sample sample;
    sample.id = "probe";
    sample.features = random_tensor({12, cfg.video_feature_dim}, rng);
    sample.question = {2, 9, 5};
    sample.answer = {6};
    auto result = train::gradient_check_model(p, sample);
    EXPECT_LT(result.max_rel_error, 1e-4) << result.worst_param;
}

TEST(GradientCheck, ZeroedModelDegenerateCase) {
    HCSAConfig cfg = micro_config();
    ModelParams p = build_model_params(cfg);
    for (auto& [name, t] : p.named) std::fill(t.values().begin(), t.values().end(), 0.0);
    std::mt19937_64 rng(9);
    data::Sample sample;
    sample.id = "probe";
    sample.features = random_tensor({8, cfg.video_feature_dim}, rng);
    sample.question = {1, 2};
    sample.answer = {5};
    auto result = train::gradient_check_model(p, sample);
    EXPECT_LT(result.max_rel_error, 1e-4) << result.worst_param;
}

TEST(GradientCheck, StableAcrossEpsilonSweep) {
    HCSAConfig cfg = micro_config();
    cfg.seed = 10;
    ModelParams p = build_model_params(cfg);
    std::mt19937_64 rng(10);
    data::Sample sample;
    sample.id = "probe";
    sample.features = random_tensor({8, cfg.video_feature_dim}, rng);
    sample.question = {4, 11, 3};
    sample.answer = {8};
    for (double eps : {1e-4, 1e-5, 1e-6}) {
        auto result = train::gradient_check_model(p, sample, eps);
        EXPECT_LT(result.max_rel_error, 1e-4) << "eps=" << eps << " " << result.worst_param;
    }
}
