#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "hcsa/commands.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string checkpoint_path;
    std::string out_path;
    std::string data_path;
    long long seed_override = -1;
};

hcsa::RunConfig load_config(const CommonFlags& flags) {
    if (flags.config_path.empty()) {
        throw hcsa::ConfigError("--config PATH is required for this command");
    }
    hcsa::RunConfig cfg = hcsa::load_run_config(flags.config_path);
    if (flags.seed_override >= 0) {
        cfg.model.seed = static_cast<std::uint64_t>(flags.seed_override);
        cfg.synthetic.seed = cfg.model.seed;
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hierarchical convolutional self-attention video QA"};
    app.require_subcommand(1);

    CommonFlags flags;
    hcsa::cli::EvalFlags eval_flags;
    std::string predictions_path, references_path;
    double gamma = -1.0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", flags.config_path, "run configuration JSON");
        cmd->add_option("--seed", flags.seed_override, "override the config seed");
        cmd->add_option("--out", flags.out_path, "output path");
    };

    CLI::App* gen = app.add_subcommand("gen-data", "generate a synthetic dataset");
    add_common(gen);

    CLI::App* train_cmd = app.add_subcommand("train", "train a model from a config");
    add_common(train_cmd);

    CLI::App* infer = app.add_subcommand("infer", "generate answers for a dataset");
    infer->add_option("--checkpoint", flags.checkpoint_path, "model checkpoint")->required();
    infer->add_option("--data", flags.data_path, "dataset directory")->required();
    infer->add_option("--out", flags.out_path, "predictions JSONL path")->required();

    CLI::App* eval = app.add_subcommand("eval", "score predictions against references");
    eval->add_option("--pred", predictions_path, "predictions JSONL")->required();
    eval->add_option("--refs", references_path, "references JSONL")->required();
    eval->add_option("--oracle", eval_flags.oracle, "exact|synonyms|taxonomy");
    eval->add_option("--taxonomy", eval_flags.taxonomy_path, "taxonomy TSV (term<TAB>parent)");
    eval->add_option("--synonyms", eval_flags.synonyms_path, "synonym TSV (a<TAB>b)");
    eval->add_option("--gamma", gamma, "extra WUPS threshold to report");
    eval->add_option("--out", flags.out_path, "write the report JSON here");

    CLI::App* bench = app.add_subcommand("bench", "encoder efficiency benchmark");
    add_common(bench);

    CLI::App* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
    add_common(gradcheck);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? hcsa::exit_code::ok : hcsa::exit_code::config;
    }

    try {
        if (gen->parsed()) {
            hcsa::RunConfig cfg = load_config(flags);
            const std::string out = flags.out_path.empty() ? cfg.output_dir : flags.out_path;
            hcsa::cli::run_gen_data(cfg, out);
        } else if (train_cmd->parsed()) {
            hcsa::RunConfig cfg = load_config(flags);
            if (!flags.out_path.empty()) cfg.output_dir = flags.out_path;
            hcsa::cli::run_train(cfg);
        } else if (infer->parsed()) {
            hcsa::cli::run_infer(flags.checkpoint_path, flags.data_path, flags.out_path);
        } else if (eval->parsed()) {
            if (gamma >= 0.0) eval_flags.gamma = gamma;
            hcsa::cli::run_eval(predictions_path, references_path, eval_flags,
                                flags.out_path.empty() ? std::filesystem::path{}
                                                       : std::filesystem::path{flags.out_path});
        } else if (bench->parsed()) {
            hcsa::RunConfig cfg = load_config(flags);
            const std::string out = flags.out_path.empty()
                                        ? (std::filesystem::path(cfg.output_dir) / "bench.csv")
                                              .string()
                                        : flags.out_path;
            hcsa::cli::require_output_dir(std::filesystem::path(out).parent_path());
            hcsa::cli::run_bench_command(cfg, out);
        } else if (gradcheck->parsed()) {
            hcsa::RunConfig cfg = load_config(flags);
            const double err = hcsa::cli::run_gradcheck(cfg);
            if (err >= 1e-4) {
                std::fprintf(stderr, "gradcheck failed: %.3e >= 1e-4\n", err);
                return hcsa::exit_code::runtime;
            }
        }
    } catch (const hcsa::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return hcsa::exit_code::config;
    } catch (const hcsa::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return hcsa::exit_code::input;
    } catch (const hcsa::InputError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return hcsa::exit_code::input;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return hcsa::exit_code::runtime;
    }
    return hcsa::exit_code::ok;
}
