#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "hcsa/model.hpp"

namespace hcsa::bench {

struct Stats {
    double mean_ms = 0.0;    // trimmed mean (min and max dropped)
    double stddev_ms = 0.0;  // stddev of the kept repetitions
};

struct BenchResult {
    std::string encoder;
    std::size_t length = 0;
    Stats forward;
    Stats train;  // forward + backward
    std::size_t param_count = 0;
    std::size_t reps = 0;
};

inline Stats summarize(std::vector<double> times_ms) {
    if (times_ms.size() >= 3) {
        std::sort(times_ms.begin(), times_ms.end());
        times_ms.erase(times_ms.begin());
        times_ms.pop_back();
    }
    Stats s;
    for (double t : times_ms) s.mean_ms += t;
    s.mean_ms /= static_cast<double>(times_ms.size());
    double sq = 0.0;
    for (double t : times_ms) sq += (t - s.mean_ms) * (t - s.mean_ms);
    s.stddev_ms = std::sqrt(sq / static_cast<double>(times_ms.size()));
    return s;
}

inline double pooled_stddev(const Stats& a, const Stats& b) {
    return std::sqrt((a.stddev_ms * a.stddev_ms + b.stddev_ms * b.stddev_ms) / 2.0);
}

// True when the trimmed means differ by more than two pooled stddevs; only
// then is a faster/slower claim made.
inline bool clearly_separated(const Stats& fast, const Stats& slow) {
    return slow.mean_ms - fast.mean_ms > 2.0 * pooled_stddev(fast, slow);
}

// Stacked-GRU depth whose parameter count lands nearest the hierarchical
// encoder's layer-stack budget. One cell of width d holds 6d² + 3d elements.
inline std::size_t matched_gru_layers(const HCSAConfig& cfg) {
    HCSAConfig probe = cfg;
    probe.encoder = EncoderKind::hcsa;
    ModelParams p = build_model_params(probe);
    const std::size_t target = count_params_with_prefix(p, "enc.");
    const std::size_t d = cfg.hidden_dim;
    const std::size_t per_cell = 6 * d * d + 3 * d;
    const std::size_t layers = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(static_cast<double>(target) /
                                                 static_cast<double>(per_cell))));
    return layers;
}

// Ratio of recurrent-baseline encoder params to hierarchical encoder params.
inline double gru_param_ratio(const HCSAConfig& cfg) {
    HCSAConfig probe = cfg;
    probe.encoder = EncoderKind::hcsa;
    ModelParams p = build_model_params(probe);
    const double target = static_cast<double>(count_params_with_prefix(p, "enc."));
    const std::size_t d = cfg.hidden_dim;
    const double per_cell = static_cast<double>(6 * d * d + 3 * d);
    return per_cell * static_cast<double>(matched_gru_layers(cfg)) / target;
}

namespace detail {

inline Tensor random_features(std::size_t n, std::size_t dv, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> data(n * dv);
    for (double& v : data) v = dist(rng);
    return Tensor::wrap({n, dv}, std::move(data));
}

inline std::vector<int> fixed_question(const HCSAConfig& cfg) {
    std::vector<int> q;
    for (int i = 0; i < 5; ++i) {
        q.push_back(static_cast<int>((7u * i + 2u) % cfg.question_vocab));
    }
    return q;
}

struct EncoderSetup {
    ModelParams params;
    std::size_t gru_layers = 0;
    QuestionEncoding question;  // built outside the timed region
};

inline EncoderSetup make_setup(const HCSAConfig& base, EncoderKind kind, std::size_t length) {
    HCSAConfig cfg = base;
    cfg.encoder = kind;
    cfg.max_video_len = std::max(cfg.max_video_len, length);
    EncoderSetup setup{build_model_params(cfg), 0, {}};
    if (kind == EncoderKind::gru) {
        setup.gru_layers = matched_gru_layers(base);
        add_gru_encoder_params(setup.params, setup.gru_layers);
    }
    setup.question = encode_question(setup.params, fixed_question(cfg));
    return setup;
}

inline EncoderOutput run_encoder(const EncoderSetup& s, const Tensor& features) {
    if (s.params.cfg.encoder == EncoderKind::gru) {
        return encode_video_gru(s.params, features, s.gru_layers);
    }
    return encode_video(s.params, features, s.question);
}

}  // namespace detail

// Measures forward and forward+backward wallclock for the hierarchical and
// recurrent encoders at each length. The two parameter sets agree within
// ±25%; timing excludes data generation, question encoding and I/O.
inline std::vector<BenchResult> run_bench(const std::vector<std::size_t>& lengths,
                                          const HCSAConfig& cfg, std::size_t reps = 10,
                                          std::size_t warmup = 3) {
    if (reps < 5) throw ConfigError("run_bench: need at least 5 repetitions");
    const double ratio = gru_param_ratio(cfg);
    if (std::abs(ratio - 1.0) > 0.25) {
        throw Error("run_bench: baseline parameter ratio " + std::to_string(ratio) +
                    " outside ±25%");
    }

    std::vector<BenchResult> results;
    for (std::size_t length : lengths) {
        if (length < 1) throw ConfigError("run_bench: lengths must be >= 1");
        for (EncoderKind kind : {EncoderKind::hcsa, EncoderKind::gru}) {
            detail::EncoderSetup setup = detail::make_setup(cfg, kind, length);
            Tensor features =
                detail::random_features(length, cfg.video_feature_dim, cfg.seed ^ length);

            auto time_forward = [&]() {
                const auto t0 = std::chrono::steady_clock::now();
                EncoderOutput out = detail::run_encoder(setup, features);
                const auto t1 = std::chrono::steady_clock::now();
                (void)out;
                return std::chrono::duration<double, std::milli>(t1 - t0).count();
            };
            auto time_train = [&]() {
                const auto t0 = std::chrono::steady_clock::now();
                Tape tape;
                TapeScope scope(tape);
                EncoderOutput out = detail::run_encoder(setup, features);
                Tensor loss = sum(out.layers.back());
                setup.params.zero_grads();
                tape.backward(loss);
                const auto t1 = std::chrono::steady_clock::now();
                return std::chrono::duration<double, std::milli>(t1 - t0).count();
            };

            for (std::size_t i = 0; i < warmup; ++i) {
                time_forward();
                time_train();
            }
            std::vector<double> fwd, trn;
            for (std::size_t i = 0; i < reps; ++i) fwd.push_back(time_forward());
            for (std::size_t i = 0; i < reps; ++i) trn.push_back(time_train());

            BenchResult r;
            r.encoder = encoder_kind_name(kind);
            r.length = length;
            r.forward = summarize(fwd);
            r.train = summarize(trn);
            r.param_count = count_params_with_prefix(setup.params, "proj.") +
                            count_params_with_prefix(setup.params, "enc.") +
                            count_params_with_prefix(setup.params, "gruenc.");
            r.reps = reps;
            results.push_back(std::move(r));
        }
    }
    return results;
}

// encoder,length,mode,mean_ms,stddev_ms,params
inline std::string to_csv(const std::vector<BenchResult>& results) {
    std::string out = "encoder,length,mode,mean_ms,stddev_ms,params\n";
    auto row = [&](const BenchResult& r, const char* mode, const Stats& s) {
        out += r.encoder + "," + std::to_string(r.length) + "," + mode + "," +
               std::to_string(s.mean_ms) + "," + std::to_string(s.stddev_ms) + "," +
               std::to_string(r.param_count) + "\n";
    };
    for (const auto& r : results) {
        row(r, "forward", r.forward);
        row(r, "forward_backward", r.train);
    }
    return out;
}

}  // namespace hcsa::bench
