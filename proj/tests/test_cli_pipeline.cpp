#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

// Drives the built binary end to end: gen-data -> train -> infer -> eval,
// plus gradcheck and the error exit codes.

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* cli = HCSA_CLI_PATH;

struct PipelineEnv {
    fs::path root;

    PipelineEnv() {
        root = fs::temp_directory_path() / "hcsa_pipeline_test";
        fs::remove_all(root);
        fs::create_directories(root);
    }

    fs::path write_config() {
        json cfg = {
            {"seed", 11},
            {"model",
             {{"layers", 2},
              {"segment_factor", 4},
              {"decoder_layers", 1},
              {"kernel_width", 3},
              {"hidden_dim", 16},
              {"video_feature_dim", 8},
              {"question_gru_dim", 8},
              {"question_vocab", 68},
              {"answer_vocab", 22},
              {"max_video_len", 64},
              {"max_question_len", 12},
              {"learning_rate", 0.002}}},
            {"train", {{"epochs", 2}, {"batch_size", 8}}},
            {"data", {{"train_dir", (root / "data").string()}}},
            {"synthetic",
             {{"sequence_length", 32},
              {"feature_dim", 8},
              {"event_types", 4},
              {"events_per_sequence", 2},
              {"noise_sigma", 0.2},
              {"count", 40}}},
            {"output", {{"dir", (root / "out").string()}}},
        };
        const fs::path path = root / "config.json";
        std::ofstream out(path);
        out << cfg.dump(2);
        return path;
    }
};

int run(const std::string& args) {
    const std::string cmd = std::string(cli) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::size_t count_lines(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (!line.empty()) ++n;
    }
    return n;
}

}  // namespace

TEST(CliPipeline, EndToEnd) {
    PipelineEnv env;
    const fs::path config = env.write_config();

    ASSERT_EQ(run("gen-data --config " + config.string() + " --out " +
                  (env.root / "data").string()),
              0);
    EXPECT_TRUE(fs::exists(env.root / "data" / "manifest.jsonl"));
    EXPECT_TRUE(fs::exists(env.root / "data" / "references.jsonl"));
    EXPECT_EQ(count_lines(env.root / "data" / "manifest.jsonl"), 40u);

    ASSERT_EQ(run("train --config " + config.string()), 0);
    EXPECT_TRUE(fs::exists(env.root / "out" / "checkpoint.hcsm"));
    EXPECT_TRUE(fs::exists(env.root / "out" / "train_report.json"));

    const fs::path preds = env.root / "out" / "predictions.jsonl";
    ASSERT_EQ(run("infer --checkpoint " + (env.root / "out" / "checkpoint.hcsm").string() +
                  " --data " + (env.root / "data").string() + " --out " + preds.string()),
              0);
    EXPECT_EQ(count_lines(preds), 40u);

    const fs::path report = env.root / "out" / "eval.json";
    ASSERT_EQ(run("eval --pred " + preds.string() + " --refs " +
                  (env.root / "data" / "references.jsonl").string() + " --out " +
                  report.string()),
              0);
    std::ifstream in(report);
    json j;
    in >> j;
    EXPECT_GE(j["bleu1"].get<double>(), 0.0);
    EXPECT_LE(j["bleu1"].get<double>(), 1.0);
    EXPECT_EQ(j["sample_count"].get<std::size_t>(), 40u);

    // identity corpus scores 1.0 on every metric
    const fs::path self_report = env.root / "out" / "self_eval.json";
    ASSERT_EQ(run("eval --pred " + (env.root / "data" / "references.jsonl").string() +
                  " --refs " + (env.root / "data" / "references.jsonl").string() + " --out " +
                  self_report.string()),
              0);
    std::ifstream self_in(self_report);
    json self_j;
    self_in >> self_j;
    EXPECT_DOUBLE_EQ(self_j["bleu1"].get<double>(), 1.0);
    EXPECT_DOUBLE_EQ(self_j["wups@0.0"].get<double>(), 1.0);
    EXPECT_DOUBLE_EQ(self_j["wups@0.9"].get<double>(), 1.0);
}

TEST(CliPipeline, TaxonomyOracleFlag) {
    PipelineEnv env;
    const fs::path config = env.write_config();
    ASSERT_EQ(run("gen-data --config " + config.string() + " --out " +
                  (env.root / "data").string()),
              0);
    const fs::path refs = env.root / "data" / "references.jsonl";
    EXPECT_EQ(run("eval --pred " + refs.string() + " --refs " + refs.string() +
                  " --oracle taxonomy --taxonomy " + std::string(HCSA_ASSETS_DIR) +
                  "/taxonomy.tsv --gamma 0.5"),
              0);
    // taxonomy mode without a taxonomy path is a config error
    EXPECT_EQ(run("eval --pred " + refs.string() + " --refs " + refs.string() +
                  " --oracle taxonomy"),
              3);
}

TEST(CliPipeline, GradcheckMicroConfigExitsZero) {
    PipelineEnv env;
    json cfg = {
        {"seed", 3},
        {"model",
         {{"layers", 2},
          {"segment_factor", 2},
          {"decoder_layers", 2},
          {"kernel_width", 3},
          {"hidden_dim", 8},
          {"video_feature_dim", 6},
          {"question_gru_dim", 4},
          {"question_vocab", 20},
          {"answer_vocab", 20},
          {"max_video_len", 16},
          {"max_question_len", 8}}},
        {"synthetic", {{"sequence_length", 16}, {"feature_dim", 6}}},
    };
    const fs::path path = env.root / "micro.json";
    std::ofstream out(path);
    out << cfg.dump();
    out.close();
    EXPECT_EQ(run("gradcheck --config " + path.string()), 0);
}

TEST(CliPipeline, DistinctExitCodes) {
    PipelineEnv env;
    // missing config file -> input error
    EXPECT_EQ(run("train --config /no/such/config.json"), 2);
    // config with an unknown key -> config error
    const fs::path bad = env.root / "bad.json";
    std::ofstream out(bad);
    out << R"({"modell": {}})";
    out.close();
    EXPECT_EQ(run("train --config " + bad.string()), 3);
    // unknown flag -> config error
    EXPECT_EQ(run("train --no-such-flag"), 3);
    // missing checkpoint -> input error
    EXPECT_EQ(run("infer --checkpoint /no/such.hcsm --data /tmp --out /tmp/x.jsonl"), 2);
}
