#pragma once

#include <string>
#include <vector>

#include "hcsa/encoder.hpp"

namespace hcsa {

// GRU answer-generator state.
struct DecoderState {
    Tensor hidden;     // h^a, [1 × d]
    std::size_t step = 0;

    static DecoderState initial(std::size_t d) { return DecoderState{Tensor::zeros({1, d}), 0}; }
};

// Unnormalized scores over the answer vocabulary plus derived probabilities.
struct AnswerDistribution {
    Tensor logits;  // [1 × T]

    Tensor probabilities() const { return softmax(logits, 1); }
};

// Attention over one encoder layer:
//   β_i = scoreᵀ tanh(W1·h^l_i + W2·h^a + W3·h^Q + b)
//   v   = Σ_i softmax(β)_i · h^l_i
inline Tensor layer_attention(const ModelParams& p, const std::string& prefix,
                              const Tensor& layer, const Tensor& dec_hidden,
                              const Tensor& q_global, AttentionTrace* trace = nullptr) {
    if (layer.rows() == 0) throw ShapeError("layer_attention: empty layer");
    Tensor base = matmul(layer, p.get(prefix + ".w1"));
    Tensor ctx = add(matmul(dec_hidden, p.get(prefix + ".w2")),
                     matmul(q_global, p.get(prefix + ".w3")));
    ctx = add_rowwise(ctx, p.get(prefix + ".b"));
    Tensor scores = matmul(tanh(add_rowwise(base, ctx)), p.get(prefix + ".score"));
    Tensor weights = softmax(scores, 0);  // [n_l × 1]
    if (trace != nullptr) trace->capture(weights);
    return matmul(transpose(weights), layer);  // [1 × d]
}

// Mean-pooled attention over the top-K encoder layers:
//   h^v = (1/K) Σ_{l=L-K+1}^{L} v^l
inline Tensor multiscale_context(const ModelParams& p, const EncoderOutput& enc,
                                 const Tensor& dec_hidden, const Tensor& q_global,
                                 AttentionTrace* trace = nullptr) {
    const std::size_t total = enc.layers.size();
    const std::size_t k = p.cfg.effective_decoder_layers();
    if (k < 1 || k > total) {
        throw ConfigError("multiscale_context: K=" + std::to_string(k) + " outside [1, " +
                          std::to_string(total) + "]");
    }
    Tensor acc;
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t l = total - k + j;
        Tensor v = layer_attention(p, "dec.attn.k" + std::to_string(j), enc.layers[l],
                                   dec_hidden, q_global, trace);
        acc = j == 0 ? v : add(acc, v);
    }
    return k == 1 ? acc : scale(acc, 1.0 / static_cast<double>(k));
}

// One decoding step. The GRU input is the three-way concatenation
// x_t = [w_t ; h^Q ; h^v_t], where the multi-scale context h^v_t is computed
// with the pre-update hidden state h^a_{t-1}.
inline std::pair<AnswerDistribution, DecoderState> decode_step(const ModelParams& p,
                                                               int prev_token,
                                                               const DecoderState& state,
                                                               const EncoderOutput& enc,
                                                               const QuestionEncoding& q,
                                                               AttentionTrace* trace = nullptr) {
    if (prev_token < 0 || static_cast<std::size_t>(prev_token) >= p.cfg.answer_vocab) {
        throw InputError("decode_step: token id " + std::to_string(prev_token) +
                         " outside answer vocab of " + std::to_string(p.cfg.answer_vocab));
    }
    Tensor embedded = gather_rows(p.get("dec.embed"), {prev_token});  // [1 × d]
    Tensor context = multiscale_context(p, enc, state.hidden, q.global, trace);
    Tensor x = concat({embedded, q.global, context}, 1);
    GruCell cell = GruCell::from(p, "dec.gru");
    Tensor hidden = cell.step(x, state.hidden);
    AnswerDistribution dist{add_rowwise(matmul(hidden, p.get("dec.out.w")), p.get("dec.out.b"))};
    return {std::move(dist), DecoderState{hidden, state.step + 1}};
}

// Teacher-forced pass: step t consumes BOS (t=0) or the ground-truth token
// answer[t-1] and predicts answer[t]. Returns one distribution per answer
// position.
inline std::vector<AnswerDistribution> teacher_forced_logits(const ModelParams& p,
                                                             const std::vector<int>& answer,
                                                             const EncoderOutput& enc,
                                                             const QuestionEncoding& q,
                                                             AttentionTrace* trace = nullptr) {
    if (answer.empty()) throw InputError("teacher_forced_logits: empty answer");
    std::vector<AnswerDistribution> dists;
    dists.reserve(answer.size());
    DecoderState state = DecoderState::initial(p.cfg.hidden_dim);
    for (std::size_t t = 0; t < answer.size(); ++t) {
        const int prev = t == 0 ? token::bos : answer[t - 1];
        auto [dist, next] = decode_step(p, prev, state, enc, q, trace);
        dists.push_back(std::move(dist));
        state = std::move(next);
    }
    return dists;
}

// Greedy argmax decoding from BOS until EOS or max_len tokens; ties break to
// the lowest token id. EOS is not included in the returned sequence.
inline std::vector<int> generate(const ModelParams& p, const EncoderOutput& enc,
                                 const QuestionEncoding& q, std::size_t max_len) {
    if (max_len < 1) throw InputError("generate: max_len must be >= 1");
    std::vector<int> out;
    DecoderState state = DecoderState::initial(p.cfg.hidden_dim);
    int prev = token::bos;
    for (std::size_t t = 0; t < max_len; ++t) {
        auto [dist, next] = decode_step(p, prev, state, enc, q);
        const int tok = static_cast<int>(argmax_row(dist.logits, 0));
        if (tok == token::eos) break;
        out.push_back(tok);
        prev = tok;
        state = std::move(next);
    }
    return out;
}

}  // namespace hcsa
