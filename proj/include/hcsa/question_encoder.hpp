#pragma once

#include <vector>

#include "hcsa/gru.hpp"

namespace hcsa {

// Per-word contextual vectors h^q (each the concatenation of the forward and
// backward GRU states at that step) plus the global vector
// h^Q = [forward_state_m ; backward_state_1].
struct QuestionEncoding {
    Tensor contexts;  // [m × 2·d_q]
    Tensor global;    // [1 × 2·d_q]

    std::size_t length() const { return contexts.rows(); }
};

// Embeds the token sequence and runs forward and backward GRU passes over it.
inline QuestionEncoding encode_question(const ModelParams& p, const std::vector<int>& tokens) {
    const auto& cfg = p.cfg;
    if (tokens.empty()) throw InputError("encode_question: empty question");
    if (tokens.size() > cfg.max_question_len) {
        throw InputError("encode_question: question of " + std::to_string(tokens.size()) +
                         " tokens exceeds max " + std::to_string(cfg.max_question_len));
    }
    const std::size_t m = tokens.size();
    const std::size_t dq = cfg.question_gru_dim;

    Tensor embedded = gather_rows(p.get("question.embed"), tokens);  // [m × d_q]
    GruCell fwd = GruCell::from(p, "question.fwd");
    GruCell bwd = GruCell::from(p, "question.bwd");

    std::vector<Tensor> fwd_states(m), bwd_states(m);
    Tensor h = Tensor::zeros({1, dq});
    for (std::size_t i = 0; i < m; ++i) {
        h = fwd.step(slice(embedded, 0, i, i + 1), h);
        fwd_states[i] = h;
    }
    h = Tensor::zeros({1, dq});
    for (std::size_t i = m; i-- > 0;) {
        h = bwd.step(slice(embedded, 0, i, i + 1), h);
        bwd_states[i] = h;
    }

    std::vector<Tensor> rows(m);
    for (std::size_t i = 0; i < m; ++i) {
        rows[i] = concat({fwd_states[i], bwd_states[i]}, 1);
    }
    QuestionEncoding q;
    q.contexts = concat(rows, 0);
    q.global = concat({fwd_states[m - 1], bwd_states[0]}, 1);
    return q;
}

}  // namespace hcsa
