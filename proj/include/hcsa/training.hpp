#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hcsa/model.hpp"

namespace hcsa::train {

// ---------------------------------------------------------------------------
// loss
// ---------------------------------------------------------------------------

// Mean over the batch of per-sample sums of -log p(target_t); PAD targets are
// masked out. logits[i] is one sample's [r_i × T] matrix aligned with
// targets[i].
inline Tensor mle_loss(const std::vector<Tensor>& logits,
                       const std::vector<std::vector<int>>& targets) {
    if (logits.empty() || logits.size() != targets.size()) {
        throw ShapeError("mle_loss: " + std::to_string(logits.size()) + " logit sequences vs " +
                         std::to_string(targets.size()) + " target sequences");
    }
    Tensor total;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (logits[i].rows() != targets[i].size()) {
            throw ShapeError("mle_loss: sample " + std::to_string(i) + " has " +
                             std::to_string(logits[i].rows()) + " distributions for " +
                             std::to_string(targets[i].size()) + " targets");
        }
        std::vector<std::uint8_t> mask(targets[i].size());
        for (std::size_t t = 0; t < targets[i].size(); ++t) {
            mask[t] = targets[i][t] == token::pad ? 0 : 1;
        }
        Tensor ce = softmax_cross_entropy(logits[i], targets[i], mask);
        total = i == 0 ? ce : add(total, ce);
    }
    return scale(total, 1.0 / static_cast<double>(logits.size()));
}

// Teacher-forced loss for one sample; the decoding target appends EOS to the
// answer content.
inline Tensor sample_loss(const ModelParams& p, const data::Sample& s,
                          AttentionTrace* trace = nullptr) {
    std::vector<int> target = s.answer;
    target.push_back(token::eos);
    Tensor features = data::downsample(s.features, p.cfg.max_video_len);
    QuestionEncoding q = encode_question(p, s.question);
    EncoderOutput enc = encode_features(p, features, q, trace);
    auto dists = teacher_forced_logits(p, target, enc, q, trace);
    std::vector<Tensor> rows(dists.size());
    for (std::size_t t = 0; t < dists.size(); ++t) rows[t] = dists[t].logits;
    Tensor logits = rows.size() == 1 ? rows[0] : concat(rows, 0);
    return softmax_cross_entropy(logits, target);
}

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

struct AdamState {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::size_t step_count = 0;
    std::vector<std::vector<double>> m;  // aligned with ModelParams::named
    std::vector<std::vector<double>> v;

    static AdamState for_params(const ModelParams& p, double lr) {
        AdamState s;
        s.lr = lr;
        s.m.reserve(p.named.size());
        s.v.reserve(p.named.size());
        for (const auto& [name, t] : p.named) {
            s.m.emplace_back(t.size(), 0.0);
            s.v.emplace_back(t.size(), 0.0);
        }
        return s;
    }
};

// Standard Adam update with bias correction, applied in place.
inline void adam_step(ModelParams& params, AdamState& state) {
    if (state.m.size() != params.named.size()) {
        throw Error("adam_step: state built for a different parameter set");
    }
    state.step_count += 1;
    const double t = static_cast<double>(state.step_count);
    const double c1 = 1.0 - std::pow(state.beta1, t);
    const double c2 = 1.0 - std::pow(state.beta2, t);
    for (std::size_t i = 0; i < params.named.size(); ++i) {
        Tensor& param = params.named[i].second;
        if (!param.requires_grad() || param.grad().empty()) {
            throw Error("adam_step: parameter " + params.named[i].first + " has no gradient");
        }
        auto& value = param.values();
        const auto& grad = param.grad();
        auto& m = state.m[i];
        auto& v = state.v[i];
        for (std::size_t j = 0; j < value.size(); ++j) {
            const double g = grad[j];
            m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * g;
            v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * g * g;
            const double mhat = m[j] / c1;
            const double vhat = v[j] / c2;
            value[j] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
        }
    }
}

// Scales all gradients so their global L2 norm is at most max_norm.
// Returns the pre-clip norm.
inline double clip_grad_norm(ModelParams& params, double max_norm) {
    double sq = 0.0;
    for (const auto& [name, t] : params.named) {
        for (double g : t.grad()) sq += g * g;
    }
    const double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        const double factor = max_norm / norm;
        for (auto& [name, t] : params.named) {
            for (double& g : t.grad()) g *= factor;
        }
    }
    return norm;
}

// ---------------------------------------------------------------------------
// training loop
// ---------------------------------------------------------------------------

struct TrainOptions {
    std::size_t epochs = 10;
    std::size_t batch_size = 8;
    double grad_clip_norm = 5.0;  // <= 0 disables clipping
    std::size_t max_steps = 0;    // 0 = no cap
};

struct TrainReport {
    std::uint64_t seed = 0;
    std::vector<double> step_losses;
    std::vector<double> epoch_mean_losses;
    std::vector<double> epoch_wallclock_ms;

    std::size_t steps() const { return step_losses.size(); }
};

// Shuffles with a seeded RNG per epoch, runs teacher-forced batches through
// mle_loss, backpropagates and applies Adam. The optional per-epoch callback
// receives (epoch index, mean loss) after each epoch, e.g. for checkpointing.
inline TrainReport train(ModelParams& params, const std::vector<data::Sample>& dataset,
                         const TrainOptions& opts,
                         const std::function<void(std::size_t, double)>& on_epoch = {}) {
    if (dataset.empty()) throw InputError("train: empty dataset");
    if (opts.batch_size < 1) throw ConfigError("train: batch_size must be >= 1");

    AdamState adam = AdamState::for_params(params, params.cfg.learning_rate);
    TrainReport report;
    report.seed = params.cfg.seed;

    std::vector<std::size_t> order(dataset.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::size_t step = 0;
    bool stop = false;
    for (std::size_t epoch = 0; epoch < opts.epochs && !stop; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        std::mt19937_64 shuffle_rng(params.cfg.seed + 0x9e3779b97f4a7c15ULL * (epoch + 1));
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        double epoch_loss = 0.0;
        std::size_t epoch_steps = 0;
        for (std::size_t begin = 0; begin < order.size(); begin += opts.batch_size) {
            const std::size_t end = std::min(begin + opts.batch_size, order.size());
            Tape tape;
            TapeScope scope(tape);
            Tensor batch;
            for (std::size_t i = begin; i < end; ++i) {
                Tensor loss = sample_loss(params, dataset[order[i]]);
                batch = i == begin ? loss : add(batch, loss);
            }
            batch = scale(batch, 1.0 / static_cast<double>(end - begin));
            const double loss_value = batch.item();
            if (!std::isfinite(loss_value)) {
                throw Error("train: non-finite loss at step " + std::to_string(step));
            }
            params.zero_grads();
            tape.backward(batch);
            if (opts.grad_clip_norm > 0.0) clip_grad_norm(params, opts.grad_clip_norm);
            adam_step(params, adam);

            report.step_losses.push_back(loss_value);
            epoch_loss += loss_value;
            ++epoch_steps;
            ++step;
            if (opts.max_steps > 0 && step >= opts.max_steps) {
                stop = true;
                break;
            }
        }
        const auto t1 = std::chrono::steady_clock::now();
        const double mean = epoch_loss / static_cast<double>(epoch_steps);
        report.epoch_mean_losses.push_back(mean);
        report.epoch_wallclock_ms.push_back(
            std::chrono::duration<double, std::milli>(t1 - t0).count());
        if (on_epoch) on_epoch(epoch, mean);
    }
    return report;
}

// ---------------------------------------------------------------------------
// gradient checking
// ---------------------------------------------------------------------------

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::string worst_param;
    std::size_t worst_index = 0;
};

// Compares every parameter's analytic gradient of `loss_fn` against central
// finite differences. Relative error uses |a−n| / max(|a|, |n|, 1e-4); the
// floor keeps finite-difference noise on true-zero gradients from reading as
// error. loss_fn must be a pure function of the current parameter values.
inline GradCheckResult gradient_check(ModelParams& params,
                                      const std::function<Tensor()>& loss_fn,
                                      double epsilon = 1e-5) {
    params.zero_grads();
    {
        Tape tape;
        TapeScope scope(tape);
        Tensor loss = loss_fn();
        tape.backward(loss);
    }
    std::vector<std::vector<double>> analytic;
    analytic.reserve(params.named.size());
    for (const auto& [name, t] : params.named) analytic.push_back(t.grad());

    GradCheckResult result;
    for (std::size_t i = 0; i < params.named.size(); ++i) {
        Tensor& param = params.named[i].second;
        auto& value = param.values();
        for (std::size_t j = 0; j < value.size(); ++j) {
            const double saved = value[j];
            value[j] = saved + epsilon;
            const double up = loss_fn().item();
            value[j] = saved - epsilon;
            const double down = loss_fn().item();
            value[j] = saved;
            const double numeric = (up - down) / (2.0 * epsilon);
            const double a = analytic[i][j];
            const double rel = std::abs(a - numeric) /
                               std::max({std::abs(a), std::abs(numeric), 1e-4});
            if (rel > result.max_rel_error) {
                result.max_rel_error = rel;
                result.worst_param = params.named[i].first;
                result.worst_index = j;
            }
        }
    }
    return result;
}

// Full-model gradient check on a single sample.
inline GradCheckResult gradient_check_model(ModelParams& params, const data::Sample& sample,
                                            double epsilon = 1e-5) {
    return gradient_check(params, [&]() { return sample_loss(params, sample); }, epsilon);
}

}  // namespace hcsa::train
