#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "hcsa/bench.hpp"
#include "hcsa/checkpoint.hpp"
#include "hcsa/metrics.hpp"
#include "hcsa/run_config.hpp"

// Command implementations behind the CLI subcommands. Each function is
// deterministic given the config seed and throws typed errors; the CLI maps
// them to exit codes.
namespace hcsa::cli {

inline void require_output_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory " + dir.string());
}

// gen-data: synthesize a dataset into `out_dir` (manifest, feature files,
// references).
inline void run_gen_data(const RunConfig& cfg, const std::filesystem::path& out_dir) {
    require_output_dir(out_dir);
    auto samples = data::generate_synthetic_dataset(cfg.synthetic, cfg.synthetic_count);
    data::save_dataset(samples, out_dir);
    std::printf("wrote %zu samples to %s\n", samples.size(), out_dir.string().c_str());
}

struct TrainOutcome {
    train::TrainReport report;
    std::filesystem::path checkpoint_path;
    std::filesystem::path report_path;
};

inline nlohmann::ordered_json report_to_json(const train::TrainReport& report) {
    nlohmann::ordered_json j;
    j["seed"] = report.seed;
    j["steps"] = report.steps();
    j["step_losses"] = report.step_losses;
    j["epoch_mean_losses"] = report.epoch_mean_losses;
    j["epoch_wallclock_ms"] = report.epoch_wallclock_ms;
    return j;
}

// train: fit the configured model on the dataset under data.train_dir,
// checkpointing every epoch and writing a training report.
inline TrainOutcome run_train(const RunConfig& cfg) {
    if (cfg.train_manifest_dir.empty()) {
        throw ConfigError("train: config key data.train_dir is required");
    }
    auto dataset = data::load_dataset(cfg.train_manifest_dir);
    if (dataset.empty()) throw InputError("train: dataset is empty");

    const std::filesystem::path out_dir = cfg.output_dir;
    require_output_dir(out_dir);

    ModelParams params = build_model_params(cfg.model);
    const std::string config_json = run_config_to_json(cfg).dump();
    const std::filesystem::path ckpt_path = out_dir / "checkpoint.hcsm";

    std::size_t steps_done = 0;
    auto report = train::train(params, dataset, cfg.train_opts,
                               [&](std::size_t epoch, double mean_loss) {
                                   steps_done += 1;
                                   save_checkpoint(
                                       checkpoint_from_params(params, config_json, epoch + 1),
                                       ckpt_path);
                                   std::printf("epoch %zu mean loss %.6f\n", epoch, mean_loss);
                               });
    (void)steps_done;

    const std::filesystem::path report_path = out_dir / "train_report.json";
    std::ofstream rep(report_path);
    rep << report_to_json(report).dump(2) << "\n";
    if (!rep) throw InputError("train: failed writing " + report_path.string());
    return TrainOutcome{std::move(report), ckpt_path, report_path};
}

// Rebuilds a model from a checkpoint (config snapshot plus tensor payload).
inline std::pair<ModelParams, RunConfig> model_from_checkpoint(
    const std::filesystem::path& ckpt_path) {
    Checkpoint ckpt = load_checkpoint(ckpt_path);
    nlohmann::json snapshot;
    try {
        snapshot = nlohmann::json::parse(ckpt.config_json);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(DataError::Kind::corrupt_header,
                        ckpt_path.string() + ": config snapshot unreadable: " + e.what());
    }
    RunConfig cfg = parse_run_config(snapshot);
    ModelParams params = build_model_params(cfg.model);
    if (cfg.model.encoder == EncoderKind::gru) {
        add_gru_encoder_params(params, bench::matched_gru_layers(cfg.model));
    }
    apply_checkpoint(params, ckpt);
    return {std::move(params), std::move(cfg)};
}

// infer: greedy answers for every sample in the dataset, written as JSONL
// {"id", "answer", "type"}.
inline void run_infer(const std::filesystem::path& ckpt_path,
                      const std::filesystem::path& data_dir,
                      const std::filesystem::path& out_path) {
    auto [params, cfg] = model_from_checkpoint(ckpt_path);
    auto dataset = data::load_dataset(data_dir);
    if (dataset.empty()) throw InputError("infer: dataset is empty");

    std::ofstream out(out_path);
    if (!out) throw InputError("infer: cannot write " + out_path.string());
    const auto& av = data::answer_vocab();
    for (const auto& sample : dataset) {
        const auto ids = answer_sample(params, sample, cfg.generate_max_len);
        std::string text;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (i) text += " ";
            text += av.word(ids[i]);
        }
        nlohmann::ordered_json line;
        line["id"] = sample.id;
        line["answer"] = text;
        line["type"] = sample.type;
        out << line.dump() << "\n";
    }
    std::printf("wrote %zu predictions to %s\n", dataset.size(), out_path.string().c_str());
}

namespace detail {

struct AnswerLine {
    std::string answer;
    std::string type;
};

inline std::map<std::string, AnswerLine> read_answers_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    std::map<std::string, AnswerLine> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(DataError::Kind::corrupt_manifest,
                            path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (!j.contains("id") || !j.contains("answer")) {
            throw DataError(DataError::Kind::corrupt_manifest,
                            path.string() + ":" + std::to_string(lineno) +
                                ": need 'id' and 'answer'");
        }
        out[j["id"].get<std::string>()] =
            AnswerLine{j["answer"].get<std::string>(), j.value("type", "")};
    }
    return out;
}

}  // namespace detail

struct EvalFlags {
    std::string oracle = "exact";  // exact | synonyms | taxonomy
    std::string taxonomy_path;
    std::string synonyms_path;
    std::optional<double> gamma;  // extra threshold to report
};

inline metrics::SimilarityOracle make_oracle(const EvalFlags& flags) {
    if (flags.oracle == "exact") return metrics::SimilarityOracle::exact();
    if (flags.oracle == "synonyms") {
        if (flags.synonyms_path.empty()) {
            throw ConfigError("eval: --synonyms PATH is required with --oracle synonyms");
        }
        return metrics::SimilarityOracle::synonyms_from_file(flags.synonyms_path);
    }
    if (flags.oracle == "taxonomy") {
        if (flags.taxonomy_path.empty()) {
            throw ConfigError("eval: --taxonomy PATH is required with --oracle taxonomy");
        }
        return metrics::SimilarityOracle::taxonomy_from_file(flags.taxonomy_path);
    }
    throw ConfigError("eval: unknown oracle '" + flags.oracle + "'");
}

// eval: score predictions against references (JSONL keyed by id), print the
// report and optionally write it as JSON.
inline metrics::EvalReport run_eval(const std::filesystem::path& predictions_path,
                                    const std::filesystem::path& references_path,
                                    const EvalFlags& flags,
                                    const std::filesystem::path& out_path = {}) {
    auto predictions = detail::read_answers_jsonl(predictions_path);
    auto references = detail::read_answers_jsonl(references_path);

    std::vector<metrics::EvalItem> items;
    for (const auto& [id, ref] : references) {
        auto it = predictions.find(id);
        if (it == predictions.end()) {
            throw InputError("eval: no prediction for id '" + id + "'");
        }
        items.push_back(metrics::EvalItem{id, it->second.answer, ref.answer,
                                          ref.type.empty() ? it->second.type : ref.type});
    }
    if (items.empty()) throw InputError("eval: no reference items");

    metrics::SimilarityOracle oracle = make_oracle(flags);
    metrics::EvalReport report = metrics::evaluate(items, oracle);

    std::printf("samples   %zu\n", report.sample_count);
    std::printf("BLEU-1    %.4f\n", report.bleu1);
    std::printf("WUPS@0.0  %.4f\n", report.wups_0);
    std::printf("WUPS@0.9  %.4f\n", report.wups_9);
    for (const auto& [type, scores] : report.by_type) {
        std::printf("  [%s] n=%zu BLEU-1 %.4f WUPS@0.0 %.4f WUPS@0.9 %.4f\n", type.c_str(),
                    scores.count, scores.bleu1, scores.wups_0, scores.wups_9);
    }

    nlohmann::ordered_json j;
    j["sample_count"] = report.sample_count;
    j["bleu1"] = report.bleu1;
    j["wups@0.0"] = report.wups_0;
    j["wups@0.9"] = report.wups_9;
    if (flags.gamma.has_value()) {
        std::vector<std::vector<std::string>> preds, refs;
        for (const auto& item : items) {
            preds.push_back(metrics::tokenize(item.prediction));
            refs.push_back(metrics::tokenize(item.reference));
        }
        const double extra = metrics::wups(preds, refs, *flags.gamma, oracle);
        std::printf("WUPS@%.2f  %.4f\n", *flags.gamma, extra);
        j["wups@gamma"] = extra;
        j["gamma"] = *flags.gamma;
    }
    nlohmann::ordered_json types = nlohmann::ordered_json::object();
    for (const auto& [type, scores] : report.by_type) {
        types[type] = {{"count", scores.count},
                       {"bleu1", scores.bleu1},
                       {"wups@0.0", scores.wups_0},
                       {"wups@0.9", scores.wups_9}};
    }
    j["by_type"] = types;
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        out << j.dump(2) << "\n";
        if (!out) throw InputError("eval: failed writing " + out_path.string());
    }
    return report;
}

// bench: run the encoder-efficiency comparison and write CSV.
inline std::vector<bench::BenchResult> run_bench_command(const RunConfig& cfg,
                                                         const std::filesystem::path& out_path) {
    auto results = bench::run_bench(cfg.bench_lengths, cfg.model, cfg.bench_reps,
                                    cfg.bench_warmup);
    const std::string csv = bench::to_csv(results);
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        out << csv;
        if (!out) throw InputError("bench: failed writing " + out_path.string());
    }
    std::printf("%s", csv.c_str());

    for (std::size_t i = 0; i + 1 < results.size(); i += 2) {
        const auto& a = results[i];
        const auto& b = results[i + 1];
        const bool separated = bench::clearly_separated(
            a.train.mean_ms <= b.train.mean_ms ? a.train : b.train,
            a.train.mean_ms <= b.train.mean_ms ? b.train : a.train);
        std::printf("length %4zu fwd+bwd: %s %.2f ms vs %s %.2f ms (%s)\n", a.length,
                    a.encoder.c_str(), a.train.mean_ms, b.encoder.c_str(), b.train.mean_ms,
                    separated ? "separated > 2 pooled sd" : "within noise");
    }

    HCSAConfig full = cfg.model;
    full.encoder = EncoderKind::hcsa;
    std::printf("full-model parameter count: %zu\n", count_params(build_model_params(full)));
    std::printf("recurrent baseline: %zu stacked cells, param ratio %.3f\n",
                bench::matched_gru_layers(cfg.model), bench::gru_param_ratio(cfg.model));
    return results;
}

// Deterministic probe sample whose token ids fit the configured vocabularies,
// for finite-difference sweeps of micro models.
inline data::Sample make_gradcheck_probe(const HCSAConfig& cfg, std::size_t video_len,
                                         std::size_t question_len) {
    std::mt19937_64 rng(cfg.seed + 7);
    std::uniform_real_distribution<double> feat(-1.0, 1.0);
    std::vector<double> features(video_len * cfg.video_feature_dim);
    for (double& v : features) v = feat(rng);

    data::Sample probe;
    probe.id = "gradcheck_probe";
    probe.features = Tensor::wrap({video_len, cfg.video_feature_dim}, std::move(features));
    std::uniform_int_distribution<int> qtok(0, static_cast<int>(cfg.question_vocab) - 1);
    for (std::size_t i = 0; i < question_len; ++i) probe.question.push_back(qtok(rng));
    std::uniform_int_distribution<int> atok(4, static_cast<int>(cfg.answer_vocab) - 1);
    probe.answer = {atok(rng)};
    probe.type = "probe";
    return probe;
}

// gradcheck: finite-difference sweep of the full encoder-decoder loss on a
// probe sample; returns the worst relative error.
inline double run_gradcheck(const RunConfig& cfg) {
    const std::size_t video_len =
        std::min({cfg.synthetic.sequence_length, cfg.model.max_video_len, std::size_t{16}});
    const std::size_t question_len = std::min(cfg.model.max_question_len, std::size_t{4});
    data::Sample probe = make_gradcheck_probe(cfg.model, video_len, question_len);

    ModelParams params = build_model_params(cfg.model);
    if (count_params(params) > 50000) {
        log::warn("gradcheck: " + std::to_string(count_params(params)) +
                  " parameters; this sweep is meant for micro configs");
    }
    auto result = train::gradient_check_model(params, probe);
    std::printf("gradcheck: max relative error %.3e (worst %s[%zu])\n", result.max_rel_error,
                result.worst_param.c_str(), result.worst_index);
    return result.max_rel_error;
}

}  // namespace hcsa::cli
