#pragma once

#include <cmath>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hcsa/config.hpp"
#include "hcsa/ops.hpp"

namespace hcsa {

// Named collection of all learnable tensors plus the hyperparameter record.
// Tensors are registered in a fixed build order so optimizer state,
// checkpoints and gradient sweeps all iterate identically.
struct ModelParams {
    HCSAConfig cfg;
    std::vector<std::pair<std::string, Tensor>> named;
    std::unordered_map<std::string, std::size_t> index;

    Tensor& get(const std::string& name) {
        auto it = index.find(name);
        if (it == index.end()) throw Error("unknown parameter: " + name);
        return named[it->second].second;
    }
    const Tensor& get(const std::string& name) const {
        auto it = index.find(name);
        if (it == index.end()) throw Error("unknown parameter: " + name);
        return named[it->second].second;
    }
    bool has(const std::string& name) const { return index.count(name) != 0; }

    void add(const std::string& name, Tensor t) {
        t.set_requires_grad(true);
        index[name] = named.size();
        named.emplace_back(name, std::move(t));
    }

    void zero_grads() {
        for (auto& [name, t] : named) t.zero_grad();
    }
};

namespace detail {

// Weights: uniform in ±sqrt(1/fan_in). Biases are created with make_bias.
inline Tensor init_weight(Shape shape, std::size_t fan_in, std::mt19937_64& rng) {
    const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    std::vector<double> data(numel(shape));
    for (double& v : data) v = dist(rng);
    return Tensor::wrap(std::move(shape), std::move(data));
}

inline Tensor make_bias(std::size_t width) { return Tensor::zeros({1, width}); }

// One GRU cell: z = σ(g_z + h·Whz), r = σ(g_r + h·Whr),
// c = tanh(g_c + (r⊗h)·Whc), h' = (1−z)⊗h + z⊗c, where
// [g_z; g_r; g_c] = x·Wx + b.
inline void add_gru_cell(ModelParams& p, const std::string& prefix, std::size_t in_dim,
                         std::size_t hidden, std::mt19937_64& rng) {
    p.add(prefix + ".wx", init_weight({in_dim, 3 * hidden}, in_dim, rng));
    p.add(prefix + ".b", make_bias(3 * hidden));
    p.add(prefix + ".whz", init_weight({hidden, hidden}, hidden, rng));
    p.add(prefix + ".whr", init_weight({hidden, hidden}, hidden, rng));
    p.add(prefix + ".whc", init_weight({hidden, hidden}, hidden, rng));
}

// Additive attention scorer: score(u, v) = wᵀ tanh(W1·u + W2·v + b).
inline void add_attention(ModelParams& p, const std::string& prefix, std::size_t dim1,
                          std::size_t dim2, std::size_t attn_dim, std::mt19937_64& rng) {
    p.add(prefix + ".w1", init_weight({dim1, attn_dim}, dim1, rng));
    p.add(prefix + ".w2", init_weight({dim2, attn_dim}, dim2, rng));
    p.add(prefix + ".b", make_bias(attn_dim));
    p.add(prefix + ".score", init_weight({attn_dim, 1}, attn_dim, rng));
}

}  // namespace detail

// Builds every learnable tensor for the configured model. The attention
// projection width equals the model width d.
inline ModelParams build_model_params(const HCSAConfig& cfg) {
    cfg.validate();
    ModelParams p;
    p.cfg = cfg;
    std::mt19937_64 rng(cfg.seed);

    const std::size_t d = cfg.hidden_dim;
    const std::size_t dq = cfg.question_gru_dim;
    const std::size_t q_width = 2 * dq;  // BiGRU output width
    const std::size_t attn = d;

    // question encoder
    p.add("question.embed", detail::init_weight({cfg.question_vocab, dq}, dq, rng));
    detail::add_gru_cell(p, "question.fwd", dq, dq, rng);
    detail::add_gru_cell(p, "question.bwd", dq, dq, rng);

    // video projection into model width
    p.add("proj.w", detail::init_weight({cfg.video_feature_dim, d}, cfg.video_feature_dim, rng));
    p.add("proj.b", detail::make_bias(d));

    switch (cfg.encoder) {
        case EncoderKind::hcsa:
            for (std::size_t l = 0; l < cfg.layers; ++l) {
                const std::string lp = "enc.l" + std::to_string(l);
                const std::size_t kd = cfg.kernel_width * d;
                p.add(lp + ".conv0.w", detail::init_weight({kd, 2 * d}, kd, rng));
                p.add(lp + ".conv0.b", detail::make_bias(2 * d));
                p.add(lp + ".conv1.w", detail::init_weight({kd, 2 * d}, kd, rng));
                p.add(lp + ".conv1.b", detail::make_bias(2 * d));
                if (cfg.asu == AsuMode::attentive) {
                    detail::add_attention(p, lp + ".asu", d, q_width, attn, rng);
                }
                if (cfg.qsu == QsuMode::question_aware) {
                    detail::add_attention(p, lp + ".qsu", d, q_width, attn, rng);
                } else {
                    detail::add_attention(p, lp + ".qsu", d, d, attn, rng);
                }
            }
            break;
        case EncoderKind::mean_pool:
            break;  // projection only
        case EncoderKind::gru: {
            // Stacked GRU over the projected sequence; layer count chosen to
            // land within ±25% of the layer-stack parameter budget of the
            // equivalent hierarchical encoder (see bench.hpp).
            break;  // cells added by add_gru_encoder_params below
        }
    }

    // decoder
    const std::size_t k_eff = cfg.effective_decoder_layers();
    p.add("dec.embed", detail::init_weight({cfg.answer_vocab, d}, d, rng));
    detail::add_gru_cell(p, "dec.gru", d + q_width + d, d, rng);
    for (std::size_t j = 0; j < k_eff; ++j) {
        const std::string ap = "dec.attn.k" + std::to_string(j);
        p.add(ap + ".w1", detail::init_weight({d, attn}, d, rng));
        p.add(ap + ".w2", detail::init_weight({d, attn}, d, rng));
        p.add(ap + ".w3", detail::init_weight({q_width, attn}, q_width, rng));
        p.add(ap + ".b", detail::make_bias(attn));
        p.add(ap + ".score", detail::init_weight({attn, 1}, attn, rng));
    }
    p.add("dec.out.w", detail::init_weight({d, cfg.answer_vocab}, d, rng));
    p.add("dec.out.b", detail::make_bias(cfg.answer_vocab));

    return p;
}

// Registers `layers` stacked GRU cells for the recurrent encoder baseline.
// The first cell consumes the projected sequence (width d), so all cells
// share the model width.
inline void add_gru_encoder_params(ModelParams& p, std::size_t layers) {
    std::mt19937_64 rng(p.cfg.seed ^ 0x5f3759df);
    for (std::size_t l = 0; l < layers; ++l) {
        detail::add_gru_cell(p, "gruenc.l" + std::to_string(l), p.cfg.hidden_dim,
                             p.cfg.hidden_dim, rng);
    }
}

// Exact learnable-element count.
inline std::size_t count_params(const ModelParams& p) {
    std::size_t n = 0;
    for (const auto& [name, t] : p.named) n += t.size();
    return n;
}

// Element count over parameters whose name starts with `prefix`.
inline std::size_t count_params_with_prefix(const ModelParams& p, const std::string& prefix) {
    std::size_t n = 0;
    for (const auto& [name, t] : p.named) {
        if (name.rfind(prefix, 0) == 0) n += t.size();
    }
    return n;
}

}  // namespace hcsa
