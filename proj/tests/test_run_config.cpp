#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "hcsa/run_config.hpp"

using namespace hcsa;
using nlohmann::json;

TEST(RunConfig, DefaultsMatchReferenceSettings) {
    RunConfig cfg = parse_run_config(json::object());
    EXPECT_EQ(cfg.model.layers, 3u);
    EXPECT_EQ(cfg.model.segment_factor, 4u);
    EXPECT_EQ(cfg.model.decoder_layers, 2u);
    EXPECT_EQ(cfg.model.kernel_width, 5u);
    EXPECT_EQ(cfg.model.hidden_dim, 256u);
    EXPECT_EQ(cfg.model.max_video_len, 512u);
    EXPECT_EQ(cfg.model.question_vocab, 10000u);
    EXPECT_EQ(cfg.model.answer_vocab, 10000u);
    EXPECT_DOUBLE_EQ(cfg.model.learning_rate, 0.001);
    EXPECT_EQ(cfg.model.encoder, EncoderKind::hcsa);
    EXPECT_EQ(cfg.model.asu, AsuMode::attentive);
    EXPECT_EQ(cfg.model.qsu, QsuMode::question_aware);
    EXPECT_FALSE(cfg.model.top_layer_only);
    EXPECT_EQ(cfg.train_opts.batch_size, 8u);
    EXPECT_DOUBLE_EQ(cfg.train_opts.grad_clip_norm, 5.0);
}

TEST(RunConfig, UnknownKeysRejectedWithName) {
    try {
        parse_run_config(json::parse(R"({"model": {"hidden_dims": 4}})"));
        FAIL() << "expected config error";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("model.hidden_dims"), std::string::npos);
    }
    try {
        parse_run_config(json::parse(R"({"modle": {}})"));
        FAIL() << "expected config error";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("modle"), std::string::npos);
    }
}

TEST(RunConfig, AblationSwitchesMapToModes) {
    RunConfig cfg = parse_run_config(json::parse(
        R"({"ablation": {"asu_mean_pool": true, "qsu_plain_self_attention": true,
            "top_layer_only": true}})"));
    EXPECT_EQ(cfg.model.asu, AsuMode::mean_pool);
    EXPECT_EQ(cfg.model.qsu, QsuMode::plain_self_attention);
    EXPECT_TRUE(cfg.model.top_layer_only);
    EXPECT_EQ(cfg.model.effective_decoder_layers(), 1u);
}

TEST(RunConfig, EncoderKinds) {
    EXPECT_EQ(parse_run_config(json::parse(R"({"encoder": "mean_pool"})")).model.encoder,
              EncoderKind::mean_pool);
    EXPECT_EQ(parse_run_config(json::parse(R"({"encoder": "gru"})")).model.encoder,
              EncoderKind::gru);
    EXPECT_THROW(parse_run_config(json::parse(R"({"encoder": "transformer"})")), ConfigError);
}

TEST(RunConfig, ValidationErrors) {
    EXPECT_THROW(parse_run_config(json::parse(R"({"model": {"kernel_width": 4}})")),
                 ConfigError);
    EXPECT_THROW(parse_run_config(json::parse(R"({"model": {"hidden_dim": 7}})")), ConfigError);
    EXPECT_THROW(parse_run_config(json::parse(R"({"model": {"decoder_layers": 9}})")),
                 ConfigError);
    EXPECT_THROW(parse_run_config(json::parse(R"({"model": {"learning_rate": 0}})")),
                 ConfigError);
    EXPECT_THROW(parse_run_config(json::parse(R"({"train": {"epochs": "many"}})")), ConfigError);
}

TEST(RunConfig, SyntheticSeedFollowsModelSeedUnlessSet) {
    RunConfig cfg = parse_run_config(json::parse(R"({"seed": 77})"));
    EXPECT_EQ(cfg.model.seed, 77u);
    EXPECT_EQ(cfg.synthetic.seed, 77u);
    RunConfig pinned = parse_run_config(json::parse(R"({"seed": 77, "synthetic": {"seed": 5}})"));
    EXPECT_EQ(pinned.synthetic.seed, 5u);
}

TEST(RunConfig, JsonRoundtripPreservesEverything) {
    RunConfig cfg = parse_run_config(json::parse(R"({
        "seed": 9,
        "model": {"layers": 2, "segment_factor": 3, "decoder_layers": 1, "kernel_width": 3,
                  "hidden_dim": 32, "video_feature_dim": 16, "question_gru_dim": 16,
                  "question_vocab": 68, "answer_vocab": 22, "max_video_len": 64,
                  "max_question_len": 12, "learning_rate": 0.002},
        "train": {"epochs": 4, "batch_size": 2, "grad_clip_norm": 1.5, "max_steps": 100},
        "data": {"train_dir": "a", "eval_dir": "b"},
        "synthetic": {"sequence_length": 40, "feature_dim": 16, "event_types": 4,
                      "events_per_sequence": 3, "noise_sigma": 0.25, "count": 12, "seed": 3},
        "ablation": {"asu_mean_pool": true, "qsu_plain_self_attention": false,
                     "top_layer_only": false},
        "encoder": "hcsa",
        "bench": {"lengths": [32, 64], "reps": 6, "warmup": 1},
        "output": {"dir": "out_dir"},
        "generate_max_len": 5
    })"));
    RunConfig back = parse_run_config(run_config_to_json(cfg));
    EXPECT_EQ(back.model.layers, cfg.model.layers);
    EXPECT_EQ(back.model.hidden_dim, cfg.model.hidden_dim);
    EXPECT_EQ(back.model.asu, cfg.model.asu);
    EXPECT_EQ(back.train_opts.max_steps, cfg.train_opts.max_steps);
    EXPECT_EQ(back.synthetic.seed, cfg.synthetic.seed);
    EXPECT_EQ(back.bench_lengths, cfg.bench_lengths);
    EXPECT_EQ(back.output_dir, cfg.output_dir);
    EXPECT_EQ(back.generate_max_len, cfg.generate_max_len);
    EXPECT_EQ(back.train_manifest_dir, cfg.train_manifest_dir);
}

TEST(RunConfig, MissingFileIsInputErrorMalformedIsConfigError) {
    EXPECT_THROW(load_run_config("/no/such/config.json"), InputError);
}
