#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "hcsa/gru.hpp"
#include "hcsa/question_encoder.hpp"

namespace hcsa {

// Multi-layer video representations; layers[l] has length
// ceil(layers[l-1].length / H) and element width d.
struct EncoderOutput {
    std::vector<Tensor> layers;
};

// Optional probe: collects every softmaxed attention weight vector produced
// during a forward pass (segment weights, self-attention rows, decoder
// layer-attention rows).
struct AttentionTrace {
    std::vector<std::vector<double>> rows;

    void capture(const Tensor& weights) { rows.push_back(weights.values()); }
};

// Fixed sinusoidal position table:
//   PE[pos, 2i]   = sin(pos / 10000^(2i/d))
//   PE[pos, 2i+1] = cos(pos / 10000^(2i/d))
inline Tensor position_encoding(std::size_t n, std::size_t d) {
    if (d % 2 != 0) throw ShapeError("position_encoding: width must be even");
    std::vector<double> pe(n * d);
    for (std::size_t pos = 0; pos < n; ++pos) {
        for (std::size_t i = 0; i < d / 2; ++i) {
            const double rate = std::pow(10000.0, 2.0 * static_cast<double>(i) /
                                                      static_cast<double>(d));
            const double angle = static_cast<double>(pos) / rate;
            pe[pos * d + 2 * i] = std::sin(angle);
            pe[pos * d + 2 * i + 1] = std::cos(angle);
        }
    }
    return Tensor::wrap({n, d}, std::move(pe));
}

// One convolution unit with a gated linear unit and residual connection:
//   Y_i = W[h_{i-k/2}; ...; h_{i+k/2}] + b,  Y = [A; B] ∈ R^{2d}
//   out_i = A ⊗ σ(B) + h_i
// The input is padded with floor(k/2) zero vectors on both sides, so the
// sequence length never changes.
inline Tensor conv_glu_unit(const Tensor& seq, const Tensor& w, const Tensor& b,
                            std::size_t kernel_width) {
    const std::size_t n = seq.rows(), d = seq.cols();
    const std::size_t pad = kernel_width / 2;

    Tensor padded = seq;
    if (pad > 0) {
        Tensor zeros = Tensor::zeros({pad, d});
        padded = concat({zeros, seq, zeros}, 0);
    }
    // im2col: row i of `windows` is [h_{i-pad}; ...; h_{i+pad}]
    std::vector<Tensor> shifted(kernel_width);
    for (std::size_t j = 0; j < kernel_width; ++j) {
        shifted[j] = slice(padded, 0, j, j + n);
    }
    Tensor windows = kernel_width == 1 ? shifted[0] : concat(shifted, 1);  // [n × kd]
    Tensor y = add_rowwise(matmul(windows, w), b);                         // [n × 2d]
    Tensor a = slice(y, 1, 0, d);
    Tensor gate = sigmoid(slice(y, 1, d, 2 * d));
    return add(mul(a, gate), seq);
}

// Question-guided collapse of consecutive H-element segments to one vector
// each. For segment elements o_j:
//   α_j = scoreᵀ tanh(W1·o_j + W2·h^Q + b)
//   s   = Σ_j softmax(α)_j · o_j
// When H does not divide the length, the final segment holds the remaining
// elements and its softmax normalizes over that shorter span. In mean-pool
// mode the attention weights are uniform.
inline Tensor attentive_segmentation(const ModelParams& p, const std::string& prefix,
                                     const Tensor& seq, const Tensor& q_global,
                                     std::size_t segment_factor, AsuMode mode,
                                     AttentionTrace* trace = nullptr) {
    const std::size_t n = seq.rows();
    const std::size_t segments = (n + segment_factor - 1) / segment_factor;

    Tensor scores;  // [n × 1], attentive mode only
    if (mode == AsuMode::attentive) {
        Tensor base = matmul(seq, p.get(prefix + ".w1"));
        Tensor qterm = add_rowwise(matmul(q_global, p.get(prefix + ".w2")),
                                   p.get(prefix + ".b"));  // [1 × attn]
        scores = matmul(tanh(add_rowwise(base, qterm)), p.get(prefix + ".score"));
    }

    std::vector<Tensor> pooled(segments);
    for (std::size_t s = 0; s < segments; ++s) {
        const std::size_t begin = s * segment_factor;
        const std::size_t end = std::min(begin + segment_factor, n);
        Tensor segment = slice(seq, 0, begin, end);
        if (mode == AsuMode::attentive) {
            Tensor weights = softmax(slice(scores, 0, begin, end), 0);  // [len × 1]
            if (trace != nullptr) trace->capture(weights);
            pooled[s] = matmul(transpose(weights), segment);
        } else {
            pooled[s] = reshape(mean(segment, 0), {1, seq.cols()});
        }
    }
    return segments == 1 ? pooled[0] : concat(pooled, 0);
}

// Long-range dependency modeling with the question as a filtering middle
// layer. Video-to-question scores
//   M_ij = scoreᵀ tanh(W1·s_i + W2·h^q_j + b)
// yield pairwise element affinities D = M·Mᵀ; each row of D is softmaxed and
// the attention sum is added residually:
//   h_i = s_i + Σ_j softmax(D_i)_j · s_j
// Plain mode scores elements against each other directly,
// D_ij = scoreᵀ tanh(W1·s_i + W2·s_j + b), ignoring the question.
inline Tensor question_aware_self_attention(const ModelParams& p, const std::string& prefix,
                                            const Tensor& seq, const Tensor& q_contexts,
                                            QsuMode mode, AttentionTrace* trace = nullptr) {
    const std::size_t n = seq.rows();
    Tensor base = matmul(seq, p.get(prefix + ".w1"));  // [n × attn]
    const Tensor& w2 = p.get(prefix + ".w2");
    const Tensor& bias = p.get(prefix + ".b");
    const Tensor& score = p.get(prefix + ".score");

    Tensor affinity;  // D, [n × n]
    if (mode == QsuMode::question_aware) {
        const std::size_t m = q_contexts.rows();
        std::vector<Tensor> cols(m);
        for (std::size_t j = 0; j < m; ++j) {
            Tensor qterm = add_rowwise(matmul(slice(q_contexts, 0, j, j + 1), w2), bias);
            cols[j] = matmul(tanh(add_rowwise(base, qterm)), score);  // [n × 1]
        }
        Tensor video_to_question = m == 1 ? cols[0] : concat(cols, 1);  // M, [n × m]
        affinity = matmul(video_to_question, transpose(video_to_question));
    } else {
        std::vector<Tensor> cols(n);
        for (std::size_t j = 0; j < n; ++j) {
            Tensor jterm = add_rowwise(matmul(slice(seq, 0, j, j + 1), w2), bias);
            cols[j] = matmul(tanh(add_rowwise(base, jterm)), score);
        }
        affinity = n == 1 ? cols[0] : concat(cols, 1);
    }

    Tensor weights = softmax(affinity, 1);
    if (trace != nullptr) {
        for (std::size_t i = 0; i < n; ++i) {
            trace->rows.emplace_back(weights.values().begin() + i * n,
                                     weights.values().begin() + (i + 1) * n);
        }
    }
    return add(seq, matmul(weights, seq));
}

namespace detail {

inline void check_video_input(const Tensor& features, const HCSAConfig& cfg) {
    if (features.rank() != 2 || features.rows() == 0) {
        throw InputError("encode_video: expected a nonempty [n × d_v] feature matrix");
    }
    if (features.cols() != cfg.video_feature_dim) {
        throw InputError("encode_video: feature width " + std::to_string(features.cols()) +
                         " does not match configured " + std::to_string(cfg.video_feature_dim));
    }
    if (features.rows() > cfg.max_video_len) {
        throw InputError("encode_video: length " + std::to_string(features.rows()) +
                         " exceeds max_video_len " + std::to_string(cfg.max_video_len) +
                         " (downsample first)");
    }
}

inline Tensor project_with_positions(const ModelParams& p, const Tensor& features) {
    Tensor projected = add_rowwise(matmul(features, p.get("proj.w")), p.get("proj.b"));
    return add(projected, position_encoding(projected.rows(), projected.cols()));
}

}  // namespace detail

// The hierarchical encoder: linear projection plus position encoding, then L
// layers of (conv unit ×2 → attentive segmentation → question-aware
// self-attention). Returns all L layer outputs.
inline EncoderOutput encode_video(const ModelParams& p, const Tensor& features,
                                  const QuestionEncoding& q, AttentionTrace* trace = nullptr) {
    const auto& cfg = p.cfg;
    detail::check_video_input(features, cfg);

    Tensor h = detail::project_with_positions(p, features);
    EncoderOutput out;
    out.layers.reserve(cfg.layers);
    for (std::size_t l = 0; l < cfg.layers; ++l) {
        const std::string lp = "enc.l" + std::to_string(l);
        h = conv_glu_unit(h, p.get(lp + ".conv0.w"), p.get(lp + ".conv0.b"), cfg.kernel_width);
        h = conv_glu_unit(h, p.get(lp + ".conv1.w"), p.get(lp + ".conv1.b"), cfg.kernel_width);
        h = attentive_segmentation(p, lp + ".asu", h, q.global, cfg.segment_factor, cfg.asu,
                                   trace);
        h = question_aware_self_attention(p, lp + ".qsu", h, q.contexts, cfg.qsu, trace);
        out.layers.push_back(h);
    }
    return out;
}

// Order-free baseline: the whole video collapses to the mean of its projected
// frames (no position encoding), emitted as a single one-element layer.
inline EncoderOutput encode_video_mean_pool(const ModelParams& p, const Tensor& features) {
    detail::check_video_input(features, p.cfg);
    Tensor projected = add_rowwise(matmul(features, p.get("proj.w")), p.get("proj.b"));
    EncoderOutput out;
    out.layers.push_back(reshape(mean(projected, 0), {1, p.cfg.hidden_dim}));
    return out;
}

// Recurrent baseline: stacked GRU cells over the projected sequence. The full
// final-layer state sequence is emitted as a single layer.
inline EncoderOutput encode_video_gru(const ModelParams& p, const Tensor& features,
                                      std::size_t stack_layers) {
    detail::check_video_input(features, p.cfg);
    const std::size_t d = p.cfg.hidden_dim;
    Tensor h = add_rowwise(matmul(features, p.get("proj.w")), p.get("proj.b"));
    const std::size_t n = h.rows();
    for (std::size_t l = 0; l < stack_layers; ++l) {
        GruCell cell = GruCell::from(p, "gruenc.l" + std::to_string(l));
        Tensor state = Tensor::zeros({1, d});
        std::vector<Tensor> states(n);
        for (std::size_t i = 0; i < n; ++i) {
            state = cell.step(slice(h, 0, i, i + 1), state);
            states[i] = state;
        }
        h = n == 1 ? states[0] : concat(states, 0);
    }
    EncoderOutput out;
    out.layers.push_back(h);
    return out;
}

// Expected layer lengths under the shrink law n_l = ceil(n_{l-1} / H).
inline std::vector<std::size_t> expected_layer_lengths(std::size_t n, std::size_t factor,
                                                       std::size_t layers) {
    std::vector<std::size_t> lens;
    std::size_t cur = n;
    for (std::size_t l = 0; l < layers; ++l) {
        cur = (cur + factor - 1) / factor;
        lens.push_back(cur);
    }
    return lens;
}

}  // namespace hcsa
