#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hcsa/config.hpp"
#include "hcsa/data.hpp"
#include "hcsa/training.hpp"

namespace hcsa {

// One JSON document drives every command. Unknown keys are rejected with the
// offending key named, so typos never silently fall back to defaults.
struct RunConfig {
    HCSAConfig model;
    train::TrainOptions train_opts;
    data::SyntheticTaskConfig synthetic;
    std::size_t synthetic_count = 200;
    std::string train_manifest_dir;
    std::string eval_manifest_dir;
    std::string output_dir = "out";
    std::vector<std::size_t> bench_lengths = {128, 256, 512};
    std::size_t bench_reps = 10;
    std::size_t bench_warmup = 3;
    std::size_t generate_max_len = 8;
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, const std::vector<std::string>& known,
                                const std::string& scope) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const auto& k : known) {
            if (it.key() == k) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            throw ConfigError("unknown config key '" + (scope.empty() ? it.key() : scope + "." + it.key()) + "'");
        }
    }
}

template <typename T>
inline void read_field(const nlohmann::json& obj, const char* key, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    detail::reject_unknown_keys(
        j, {"seed", "model", "train", "data", "synthetic", "ablation", "encoder", "bench",
            "output", "generate_max_len"},
        "");
    RunConfig cfg;

    detail::read_field(j, "seed", cfg.model.seed);
    detail::read_field(j, "generate_max_len", cfg.generate_max_len);

    if (j.contains("model")) {
        const auto& m = j.at("model");
        detail::reject_unknown_keys(
            m,
            {"layers", "segment_factor", "decoder_layers", "kernel_width", "hidden_dim",
             "video_feature_dim", "question_gru_dim", "question_vocab", "answer_vocab",
             "max_video_len", "max_question_len", "learning_rate"},
            "model");
        detail::read_field(m, "layers", cfg.model.layers);
        detail::read_field(m, "segment_factor", cfg.model.segment_factor);
        detail::read_field(m, "decoder_layers", cfg.model.decoder_layers);
        detail::read_field(m, "kernel_width", cfg.model.kernel_width);
        detail::read_field(m, "hidden_dim", cfg.model.hidden_dim);
        detail::read_field(m, "video_feature_dim", cfg.model.video_feature_dim);
        detail::read_field(m, "question_gru_dim", cfg.model.question_gru_dim);
        detail::read_field(m, "question_vocab", cfg.model.question_vocab);
        detail::read_field(m, "answer_vocab", cfg.model.answer_vocab);
        detail::read_field(m, "max_video_len", cfg.model.max_video_len);
        detail::read_field(m, "max_question_len", cfg.model.max_question_len);
        detail::read_field(m, "learning_rate", cfg.model.learning_rate);
    }

    if (j.contains("train")) {
        const auto& t = j.at("train");
        detail::reject_unknown_keys(t, {"epochs", "batch_size", "grad_clip_norm", "max_steps"},
                                    "train");
        detail::read_field(t, "epochs", cfg.train_opts.epochs);
        detail::read_field(t, "batch_size", cfg.train_opts.batch_size);
        detail::read_field(t, "grad_clip_norm", cfg.train_opts.grad_clip_norm);
        detail::read_field(t, "max_steps", cfg.train_opts.max_steps);
    }

    if (j.contains("data")) {
        const auto& d = j.at("data");
        detail::reject_unknown_keys(d, {"train_dir", "eval_dir"}, "data");
        detail::read_field(d, "train_dir", cfg.train_manifest_dir);
        detail::read_field(d, "eval_dir", cfg.eval_manifest_dir);
    }

    if (j.contains("synthetic")) {
        const auto& s = j.at("synthetic");
        detail::reject_unknown_keys(s,
                                    {"sequence_length", "feature_dim", "event_types",
                                     "events_per_sequence", "noise_sigma", "count", "seed",
                                     "index_offset"},
                                    "synthetic");
        detail::read_field(s, "index_offset", cfg.synthetic.index_offset);
        detail::read_field(s, "sequence_length", cfg.synthetic.sequence_length);
        detail::read_field(s, "feature_dim", cfg.synthetic.feature_dim);
        detail::read_field(s, "event_types", cfg.synthetic.event_types);
        detail::read_field(s, "events_per_sequence", cfg.synthetic.events_per_sequence);
        detail::read_field(s, "noise_sigma", cfg.synthetic.noise_sigma);
        detail::read_field(s, "count", cfg.synthetic_count);
        detail::read_field(s, "seed", cfg.synthetic.seed);
    }
    if (!j.contains("synthetic") || !j.at("synthetic").contains("seed")) {
        cfg.synthetic.seed = cfg.model.seed;
    }

    if (j.contains("ablation")) {
        const auto& a = j.at("ablation");
        detail::reject_unknown_keys(
            a, {"asu_mean_pool", "qsu_plain_self_attention", "top_layer_only"}, "ablation");
        bool asu_mp = false, qsu_sa = false, top_only = false;
        detail::read_field(a, "asu_mean_pool", asu_mp);
        detail::read_field(a, "qsu_plain_self_attention", qsu_sa);
        detail::read_field(a, "top_layer_only", top_only);
        cfg.model.asu = asu_mp ? AsuMode::mean_pool : AsuMode::attentive;
        cfg.model.qsu = qsu_sa ? QsuMode::plain_self_attention : QsuMode::question_aware;
        cfg.model.top_layer_only = top_only;
    }

    if (j.contains("encoder")) {
        const std::string kind = j.at("encoder").get<std::string>();
        if (kind == "hcsa") {
            cfg.model.encoder = EncoderKind::hcsa;
        } else if (kind == "mean_pool") {
            cfg.model.encoder = EncoderKind::mean_pool;
        } else if (kind == "gru") {
            cfg.model.encoder = EncoderKind::gru;
        } else {
            throw ConfigError("unknown encoder kind '" + kind + "'");
        }
    }

    if (j.contains("bench")) {
        const auto& b = j.at("bench");
        detail::reject_unknown_keys(b, {"lengths", "reps", "warmup"}, "bench");
        if (b.contains("lengths")) {
            cfg.bench_lengths.clear();
            for (const auto& v : b.at("lengths")) {
                cfg.bench_lengths.push_back(v.get<std::size_t>());
            }
        }
        detail::read_field(b, "reps", cfg.bench_reps);
        detail::read_field(b, "warmup", cfg.bench_warmup);
    }

    if (j.contains("output")) {
        const auto& o = j.at("output");
        detail::reject_unknown_keys(o, {"dir"}, "output");
        detail::read_field(o, "dir", cfg.output_dir);
    }

    cfg.model.validate();
    return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed config " + path.string() + ": " + e.what());
    }
    return parse_run_config(j);
}

// Serializes the effective configuration (used as the checkpoint snapshot).
inline nlohmann::ordered_json run_config_to_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["seed"] = cfg.model.seed;
    j["model"] = {{"layers", cfg.model.layers},
                  {"segment_factor", cfg.model.segment_factor},
                  {"decoder_layers", cfg.model.decoder_layers},
                  {"kernel_width", cfg.model.kernel_width},
                  {"hidden_dim", cfg.model.hidden_dim},
                  {"video_feature_dim", cfg.model.video_feature_dim},
                  {"question_gru_dim", cfg.model.question_gru_dim},
                  {"question_vocab", cfg.model.question_vocab},
                  {"answer_vocab", cfg.model.answer_vocab},
                  {"max_video_len", cfg.model.max_video_len},
                  {"max_question_len", cfg.model.max_question_len},
                  {"learning_rate", cfg.model.learning_rate}};
    j["train"] = {{"epochs", cfg.train_opts.epochs},
                  {"batch_size", cfg.train_opts.batch_size},
                  {"grad_clip_norm", cfg.train_opts.grad_clip_norm},
                  {"max_steps", cfg.train_opts.max_steps}};
    j["data"] = {{"train_dir", cfg.train_manifest_dir}, {"eval_dir", cfg.eval_manifest_dir}};
    j["synthetic"] = {{"sequence_length", cfg.synthetic.sequence_length},
                      {"feature_dim", cfg.synthetic.feature_dim},
                      {"event_types", cfg.synthetic.event_types},
                      {"events_per_sequence", cfg.synthetic.events_per_sequence},
                      {"noise_sigma", cfg.synthetic.noise_sigma},
                      {"count", cfg.synthetic_count},
                      {"seed", cfg.synthetic.seed},
                      {"index_offset", cfg.synthetic.index_offset}};
    j["ablation"] = {{"asu_mean_pool", cfg.model.asu == AsuMode::mean_pool},
                     {"qsu_plain_self_attention", cfg.model.qsu == QsuMode::plain_self_attention},
                     {"top_layer_only", cfg.model.top_layer_only}};
    j["encoder"] = encoder_kind_name(cfg.model.encoder);
    j["bench"] = {{"lengths", cfg.bench_lengths},
                  {"reps", cfg.bench_reps},
                  {"warmup", cfg.bench_warmup}};
    j["output"] = {{"dir", cfg.output_dir}};
    j["generate_max_len"] = cfg.generate_max_len;
    return j;
}

}  // namespace hcsa
