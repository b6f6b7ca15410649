#pragma once

#include <cstdint>
#include <string>

#include "hcsa/errors.hpp"

namespace hcsa {

enum class EncoderKind { hcsa, mean_pool, gru };

// Attentive segmentation mode: question-guided attention, or plain
// within-segment mean pooling.
enum class AsuMode { attentive, mean_pool };

// Self-attention mode: question-aware (affinities routed through
// video-to-question scores) or plain pairwise self-attention.
enum class QsuMode { question_aware, plain_self_attention };

struct HCSAConfig {
    std::size_t layers = 3;              // L, encoder layer count
    std::size_t segment_factor = 4;      // H, sequence shrink factor per layer
    std::size_t decoder_layers = 2;      // K, top layers attended by the decoder
    std::size_t kernel_width = 5;        // k, convolution window (odd)
    std::size_t hidden_dim = 256;        // d, model width
    std::size_t video_feature_dim = 500; // d_v, raw video feature width
    std::size_t question_gru_dim = 256;  // d_q, per-direction question GRU width
    std::size_t question_vocab = 10000;
    std::size_t answer_vocab = 10000;
    std::size_t max_video_len = 512;
    std::size_t max_question_len = 32;
    double learning_rate = 0.001;
    std::uint64_t seed = 1;

    EncoderKind encoder = EncoderKind::hcsa;
    AsuMode asu = AsuMode::attentive;
    QsuMode qsu = QsuMode::question_aware;
    bool top_layer_only = false;  // decoder attends only the top encoder layer

    // Number of encoder layers the decoder attends.
    std::size_t effective_decoder_layers() const {
        if (encoder != EncoderKind::hcsa) return 1;  // baselines emit one layer
        return top_layer_only ? 1 : decoder_layers;
    }

    void validate() const {
        if (layers < 1) throw ConfigError("layers must be >= 1");
        if (segment_factor < 1) throw ConfigError("segment_factor must be >= 1");
        if (decoder_layers < 1 || decoder_layers > layers) {
            throw ConfigError("decoder_layers must be in [1, layers]");
        }
        if (kernel_width < 1 || kernel_width % 2 == 0) {
            throw ConfigError("kernel_width must be odd and >= 1");
        }
        if (hidden_dim < 2 || hidden_dim % 2 != 0) {
            throw ConfigError("hidden_dim must be even and >= 2 (position encoding)");
        }
        if (video_feature_dim < 1 || question_gru_dim < 1) {
            throw ConfigError("feature dims must be >= 1");
        }
        if (question_vocab < 2) throw ConfigError("question_vocab must hold pad/unk");
        if (answer_vocab < 4) throw ConfigError("answer_vocab must hold bos/eos/pad/unk");
        if (max_video_len < 1 || max_question_len < 1) {
            throw ConfigError("max lengths must be >= 1");
        }
        if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
    }
};

// Reserved answer-vocabulary ids.
namespace token {
inline constexpr int bos = 0;
inline constexpr int eos = 1;
inline constexpr int pad = 2;
inline constexpr int unk = 3;
}  // namespace token

inline std::string encoder_kind_name(EncoderKind k) {
    switch (k) {
        case EncoderKind::hcsa: return "hcsa";
        case EncoderKind::mean_pool: return "mean_pool";
        case EncoderKind::gru: return "gru";
    }
    return "?";
}

}  // namespace hcsa
