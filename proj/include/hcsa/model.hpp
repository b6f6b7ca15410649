#pragma once

#include "hcsa/data.hpp"
#include "hcsa/decoder.hpp"
#include "hcsa/encoder.hpp"

namespace hcsa {

// Number of stacked cells registered for the recurrent encoder baseline.
inline std::size_t gru_stack_layers(const ModelParams& p) {
    std::size_t n = 0;
    while (p.has("gruenc.l" + std::to_string(n) + ".wx")) ++n;
    return n;
}

// Encoder dispatch by configured kind.
inline EncoderOutput encode_features(const ModelParams& p, const Tensor& features,
                                     const QuestionEncoding& q,
                                     AttentionTrace* trace = nullptr) {
    switch (p.cfg.encoder) {
        case EncoderKind::hcsa: return encode_video(p, features, q, trace);
        case EncoderKind::mean_pool: return encode_video_mean_pool(p, features);
        case EncoderKind::gru: return encode_video_gru(p, features, gru_stack_layers(p));
    }
    throw Error("encode_features: unhandled encoder kind");
}

// Greedy answer for one sample (inference mode; no tape required).
inline std::vector<int> answer_sample(const ModelParams& p, const data::Sample& sample,
                                      std::size_t max_len = 8) {
    Tensor features = data::downsample(sample.features, p.cfg.max_video_len);
    QuestionEncoding q = encode_question(p, sample.question);
    EncoderOutput enc = encode_features(p, features, q);
    return generate(p, enc, q, max_len);
}

// Fraction of samples whose greedy answer matches the reference ids exactly.
inline double exact_match_accuracy(const ModelParams& p, const std::vector<data::Sample>& samples,
                                   std::size_t max_len = 8) {
    if (samples.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& s : samples) {
        if (answer_sample(p, s, max_len) == s.answer) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(samples.size());
}

}  // namespace hcsa
