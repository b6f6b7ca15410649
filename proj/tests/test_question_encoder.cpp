#include <gtest/gtest.h>

#include <random>

#include "hcsa/question_encoder.hpp"
#include "reference_impls.hpp"
#include "test_util.hpp"

using namespace hcsa;
using hcsa_test::micro_config;

namespace {

ModelParams micro_params(std::uint64_t seed = 1) {
    HCSAConfig cfg = micro_config();
    cfg.seed = seed;
    return build_model_params(cfg);
}

void zero_all(ModelParams& p) {
    for (auto& [name, t] : p.named) std::fill(t.values().begin(), t.values().end(), 0.0);
}

}  // namespace

TEST(QuestionEncoder, SingleTokenGlobalEqualsContext) {
    ModelParams p = micro_params();
    QuestionEncoding q = encode_question(p, {3});
    ASSERT_EQ(q.contexts.rows(), 1u);
    ASSERT_EQ(q.contexts.cols(), 2 * p.cfg.question_gru_dim);
    EXPECT_EQ(q.global.values(), q.contexts.values());
}

TEST(QuestionEncoder, ZeroParamsFixedStepAndPalindromeSymmetry) {
    ModelParams p = micro_params();
    zero_all(p);
    // zero input, zero state: z=r=0.5, candidate=0, so every state stays zero
    QuestionEncoding q = encode_question(p, {2, 5, 7, 5, 2});
    for (double v : q.contexts.values()) EXPECT_DOUBLE_EQ(v, 0.0);
    for (double v : q.global.values()) EXPECT_DOUBLE_EQ(v, 0.0);
    // palindromic tokens: forward half equals backward half at every step
    const std::size_t dq = p.cfg.question_gru_dim;
    for (std::size_t i = 0; i < q.contexts.rows(); ++i) {
        for (std::size_t e = 0; e < dq; ++e) {
            EXPECT_DOUBLE_EQ(q.contexts(i, e), q.contexts(i, dq + e));
        }
    }
}

TEST(QuestionEncoder, MatchesScalarRecurrenceReference) {
    ModelParams p = micro_params(99);
    const std::vector<int> tokens = {4, 9, 1, 16, 7};
    QuestionEncoding q = encode_question(p, tokens);

    const std::size_t dq = p.cfg.question_gru_dim;
    const auto& table = p.get("question.embed").values();
    std::vector<std::vector<double>> embedded, reversed;
    for (int id : tokens) {
        embedded.emplace_back(table.begin() + id * dq, table.begin() + (id + 1) * dq);
    }
    reversed.assign(embedded.rbegin(), embedded.rend());

    auto run_ref = [&](const char* prefix, const std::vector<std::vector<double>>& xs) {
        return ref::gru_states(xs, dq, dq, p.get(std::string(prefix) + ".wx").values(),
                               p.get(std::string(prefix) + ".b").values(),
                               p.get(std::string(prefix) + ".whz").values(),
                               p.get(std::string(prefix) + ".whr").values(),
                               p.get(std::string(prefix) + ".whc").values());
    };
    const auto fwd = run_ref("question.fwd", embedded);
    const auto bwd_rev = run_ref("question.bwd", reversed);

    const std::size_t m = tokens.size();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t e = 0; e < dq; ++e) {
            EXPECT_NEAR(q.contexts(i, e), fwd[i][e], 1e-12);
            // backward state at step i sits at reversed position m-1-i
            EXPECT_NEAR(q.contexts(i, dq + e), bwd_rev[m - 1 - i][e], 1e-12);
        }
    }
    for (std::size_t e = 0; e < dq; ++e) {
        EXPECT_NEAR(q.global.values()[e], fwd[m - 1][e], 1e-12);
        EXPECT_NEAR(q.global.values()[dq + e], bwd_rev[m - 1][e], 1e-12);
    }
}

TEST(QuestionEncoder, EmbeddingGradientMatchesFiniteDifferences) {
    ModelParams p = micro_params(7);
    const std::vector<int> tokens = {2, 11, 2, 6};

    auto loss_fn = [&]() {
        QuestionEncoding q = encode_question(p, tokens);
        return sum(mul(q.contexts, q.contexts));  // scalar probe
    };

    p.zero_grads();
    {
        Tape tape;
        TapeScope scope(tape);
        tape.backward(loss_fn());
    }
    Tensor table = p.get("question.embed");
    const std::vector<double> analytic = table.grad();

    const double eps = 1e-5;
    double worst = 0.0;
    auto& value = table.values();
    for (std::size_t j = 0; j < value.size(); ++j) {
        const double saved = value[j];
        value[j] = saved + eps;
        const double up = loss_fn().item();
        value[j] = saved - eps;
        const double down = loss_fn().item();
        value[j] = saved;
        const double numeric = (up - down) / (2.0 * eps);
        const double rel = std::abs(analytic[j] - numeric) /
                           std::max({std::abs(analytic[j]), std::abs(numeric), 1e-6});
        worst = std::max(worst, rel);
    }
    EXPECT_LT(worst, 1e-4);
}

TEST(QuestionEncoder, InputErrors) {
    ModelParams p = micro_params();
    EXPECT_THROW(encode_question(p, {}), InputError);
    EXPECT_THROW(encode_question(p, {25}), InputError);  // beyond vocab of 20
    EXPECT_THROW(encode_question(p, std::vector<int>(17, 1)), InputError);  // beyond max len
}
