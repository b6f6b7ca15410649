#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "hcsa/tensor.hpp"

// Differentiable tensor operations. Every op computes its forward result
// eagerly; when a tape is active and any input requires grad, a closure with
// the matching gradient rule is recorded. Binary elementwise ops support
// same-shape operands or a scalar (1-element) operand on either side; no
// other broadcasting exists.
namespace hcsa {

namespace detail {

inline bool is_scalar(const Tensor& t) { return t.size() == 1; }

inline void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape()) {
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) +
                         " vs " + shape_str(b.shape()));
    }
}

inline void check_2d(const Tensor& t, const char* op) {
    if (t.rank() != 2) {
        throw ShapeError(std::string(op) + ": expected 2-D tensor, got " +
                         shape_str(t.shape()));
    }
}

// Splits a shape at `axis` into (outer, n, inner) extents so element
// (o, i, j) lives at flat index (o*n + i)*inner + j.
inline std::array<std::size_t, 3> axis_split(const Shape& shape, std::size_t axis) {
    std::size_t outer = 1, inner = 1;
    for (std::size_t i = 0; i < axis; ++i) outer *= shape[i];
    for (std::size_t i = axis + 1; i < shape.size(); ++i) inner *= shape[i];
    return {outer, shape[axis], inner};
}

inline void check_axis(const Tensor& t, std::size_t axis, const char* op) {
    if (axis >= t.rank()) {
        throw ShapeError(std::string(op) + ": axis " + std::to_string(axis) +
                         " out of range for " + shape_str(t.shape()));
    }
}

inline bool grad_wanted(const Tensor& a) { return current_tape() && a.requires_grad(); }
inline bool grad_wanted(const Tensor& a, const Tensor& b) {
    return current_tape() && (a.requires_grad() || b.requires_grad());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// matmul / transpose
// ---------------------------------------------------------------------------

// C = A·B for A[m×k], B[k×n]. dA = dC·Bᵀ, dB = Aᵀ·dC.
inline Tensor matmul(const Tensor& a, const Tensor& b) {
    detail::check_2d(a, "matmul");
    detail::check_2d(b, "matmul");
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    if (b.rows() != k) {
        throw ShapeError("matmul: inner dims disagree, " + shape_str(a.shape()) + " x " +
                         shape_str(b.shape()));
    }
    std::vector<double> c(m * n, 0.0);
    const auto& av = a.values();
    const auto& bv = b.values();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = av[i * k + p];
            if (aip == 0.0) continue;
            const double* brow = &bv[p * n];
            double* crow = &c[i * n];
            for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
        }
    }
    Tensor out = Tensor::wrap({m, n}, std::move(c));
    if (detail::grad_wanted(a, b)) {
        out.set_requires_grad(true);
        current_tape()->record(
            [a, b, out, m, k, n]() {
                const auto& dc = out.grad();
                if (a.requires_grad()) {
                    auto& da = a.grad();
                    const auto& bv = b.values();
                    for (std::size_t i = 0; i < m; ++i) {
                        for (std::size_t p = 0; p < k; ++p) {
                            double s = 0.0;
                            const double* dcrow = &dc[i * n];
                            const double* brow = &bv[p * n];
                            for (std::size_t j = 0; j < n; ++j) s += dcrow[j] * brow[j];
                            da[i * k + p] += s;
                        }
                    }
                }
                if (b.requires_grad()) {
                    auto& db = b.grad();
                    const auto& av = a.values();
                    for (std::size_t p = 0; p < k; ++p) {
                        for (std::size_t i = 0; i < m; ++i) {
                            const double aip = av[i * k + p];
                            if (aip == 0.0) continue;
                            const double* dcrow = &dc[i * n];
                            double* dbrow = &db[p * n];
                            for (std::size_t j = 0; j < n; ++j) dbrow[j] += aip * dcrow[j];
                        }
                    }
                }
            },
            out);
    }
    return out;
}

inline Tensor transpose(const Tensor& a) {
    detail::check_2d(a, "transpose");
    const std::size_t m = a.rows(), n = a.cols();
    std::vector<double> t(m * n);
    const auto& av = a.values();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) t[j * m + i] = av[i * n + j];
    Tensor out = Tensor::wrap({n, m}, std::move(t));
    if (detail::grad_wanted(a)) {
        out.set_requires_grad(true);
        current_tape()->record(
            [a, out, m, n]() {
                const auto& dy = out.grad();
                auto& da = a.grad();
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < n; ++j) da[i * n + j] += dy[j * m + i];
            },
            out);
    }
    return out;
}

// ---------------------------------------------------------------------------
// elementwise binary ops (same-shape or scalar operand)
// ---------------------------------------------------------------------------

namespace detail {

enum class BinKind { add, sub, mul };

inline Tensor binary_op(const Tensor& a, const Tensor& b, BinKind kind, const char* name) {
    const bool sa = is_scalar(a), sb = is_scalar(b);
    if (!sa && !sb) check_same_shape(a, b, name);
    const Tensor& big = sa ? b : a;
    const std::size_t n = big.size();
    std::vector<double> y(n);
    const auto& av = a.values();
    const auto& bv = b.values();
    for (std::size_t i = 0; i < n; ++i) {
        const double x = sa ? av[0] : av[i];
        const double z = sb ? bv[0] : bv[i];
        switch (kind) {
            case BinKind::add: y[i] = x + z; break;
            case BinKind::sub: y[i] = x - z; break;
            case BinKind::mul: y[i] = x * z; break;
        }
    }
    Tensor out = Tensor::wrap(big.shape(), std::move(y));
    if (grad_wanted(a, b)) {
        out.set_requires_grad(true);
        current_tape()->record(
            [a, b, out, kind, sa, sb, n]() {
                const auto& dy = out.grad();
                if (a.requires_grad()) {
                    auto& da = a.grad();
                    const auto& bv = b.values();
                    for (std::size_t i = 0; i < n; ++i) {
                        double g = dy[i];
                        if (kind == BinKind::mul) g *= sb ? bv[0] : bv[i];
                        da[sa ? 0 : i] += g;
                    }
                }
                if (b.requires_grad()) {
                    auto& db = b.grad();
                    const auto& av = a.values();
                    for (std::size_t i = 0; i < n; ++i) {
                        double g = dy[i];
                        if (kind == BinKind::mul) g *= sa ? av[0] : av[i];
                        if (kind == BinKind::sub) g = -g;
                        db[sb ? 0 : i] += g;
                    }
                }
            },
            out);
    }
    return out;
}

}  // namespace detail

inline Tensor add(const Tensor& a, const Tensor& b) {
    return detail::binary_op(a, b, detail::BinKind::add, "add");
}
inline Tensor sub(const Tensor& a, const Tensor& b) {
    return detail::binary_op(a, b, detail::BinKind::sub, "sub");
}
inline Tensor mul(const Tensor& a, const Tensor& b) {
    return detail::binary_op(a, b, detail::BinKind::mul, "mul");
}

// ---------------------------------------------------------------------------
// elementwise unary ops
// ---------------------------------------------------------------------------

inline Tensor sigmoid(const Tensor& x) {
    const std::size_t n = x.size();
    std::vector<double> y(n);
    const auto& xv = x.values();
    for (std::size_t i = 0; i < n; ++i) {
        const double v = xv[i];
        y[i] = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v))
                        : std::exp(v) / (1.0 + std::exp(v));
    }
    Tensor out = Tensor::wrap(x.shape(), std::move(y));
    if (detail::grad_wanted(x)) {
        out.set_requires_grad(true);
        current_tape()->record(
            [x, out, n]() {
                const auto& dy = out.grad();
                const auto& yv = out.values();
                auto& dx = x.grad();
                for (std::size_t i = 0; i < n; ++i) dx[i] += dy[i] * yv[i] * (1.0 - yv[i]);
            },
            out);
    }
    return out;
}

inline Tensor tanh(const Tensor& x) {
    const std::size_t n = x.size();
    std::vector<double> y(n);
    const auto& xv = x.values();
    for (std::size_t i = 0; i < n; ++i) y[i] = std::tanh(xv[i]);
    Tensor out = Tensor::wrap(x.shape(), std::move(y));
    if (detail::grad_wanted(x)) {
        out.set_requires_grad(true);
        current_tape()->record(
            [x, out, n]() {
                const auto& dy = out.grad();
                const auto& yv = out.values();
                auto& dx = x.grad();
                for (std::size_t i = 0; i < n; ++i) dx[i] += dy[i] * (1.0 - yv[i] * yv[i]);
            },
            out);
    }
    return out;
}

inline Tensor scale(const Tensor& x, double c) {
    const std::size_t n = x.size();
    std::vector<double> y(n);
    const auto& xv = x.values();
    for (std::size_t i = 0; i < n; ++i) y[i] = xv[i] * c;
    Tensor out = Tensor::wrap(x.shape(), std::move(y));
    if (detail::grad_wanted(x)) {
        out.set_requires_grad(true);
        current_tape()->record(
            [x, out, c, n]() {
                const auto& dy = out.grad();
                auto& dx = x.grad();
                for (std::size_t i = 0; i < n; ++i) dx[i] += dy[i] * c;
            },
            out);
    }
    return out;
}

inline Tensor add_scalar(const Tensor& x, double c) {
    const std::size_t n = x.size();
    std::vector<double> y(n);
    const auto& xv = x.values();
    for (std::size_t i = 0; i < n; ++i) y[i] = xv[i] + c;
    Tensor out = Tensor::wrap(x.shape(), std::move(y));
    if (detail::grad_wanted(x)) {
        out.set_requires_grad(true);
        current_tape()->record(
            [x, out, n]() {
                const auto& dy = out.grad();
                auto& dx = x.grad();
                for (std::size_t i = 0; i < n; ++i) dx[i] += dy[i];
            },
            out);
    }
    return out;
}

// y[i][j] = x[i][j] + row[j]; drow = column sums of dy.
inline Tensor add_rowwise(const Tensor& x, const Tensor& row) {
    detail::check_2d(x, "add_rowwise");
    const std::size_t n = x.rows(), d = x.cols();
    if (row.size() != d) {
        throw ShapeError("add_rowwise: row " + shape_str(row.shape()) + " does not match " +
                         shape_str(x.shape()));
    }
    std::vector<double> y(n * d);
    const auto& xv = x.values();
    const auto& rv = row.values();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) y[i * d + j] = xv[i * d + j] + rv[j];
    Tensor out = Tensor::wrap(x.shape(), std::move(y));
    if (detail::grad_wanted(x, row)) {
        out.set_requires_grad(true);
        current_tape()->record(
            [x, row, out, n, d]() {
                const auto& dy = out.grad();
                if (x.requires_grad()) {
                    auto& dx = x.grad();
                    for (std::size_t i = 0; i < n * d; ++i) dx[i] += dy[i];
                }
                if (row.requires_grad()) {
                    auto& dr = row.grad();
                    for (std::size_t i = 0; i < n; ++i)
                        for (std::size_t j = 0; j < d; ++j) dr[j] += dy[i * d + j];
                }
            },
            out);
    }
    return out;
}

// ---------------------------------------------------------------------------
// softmax
// ---------------------------------------------------------------------------

// Softmax along `axis`, computed with max-subtraction. Each slice of the
// output sums to 1. dx = y ⊗ (dy − <dy, y>) per slice.
inline Tensor softmax(const Tensor& x, std::size_t axis) {
    detail::check_axis(x, axis, "softmax");
    const auto [outer, n, inner] = detail::axis_split(x.shape(), axis);
    std::vector<double> y(x.size());
    const auto& xv = x.values();
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t j = 0; j < inner; ++j) {
            const std::size_t base = o * n * inner + j;
            double mx = xv[base];
            for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, xv[base + i * inner]);
            double z = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double e = std::exp(xv[base + i * inner] - mx);
                y[base + i * inner] = e;
                z += e;
            }
            const double inv = 1.0 / z;
            for (std::size_t i = 0; i < n; ++i) y[base + i * inner] *= inv;
        }
    }
    Tensor out = Tensor::wrap(x.shape(), std::move(y));
    if (detail::grad_wanted(x)) {
        out.set_requires_grad(true);
        current_tape()->record(
            [x, out, outer = outer, n = n, inner = inner]() {
                const auto& dy = out.grad();
                const auto& yv = out.values();
                auto& dx = x.grad();
                for (std::size_t o = 0; o < outer; ++o) {
                    for (std::size_t j = 0; j < inner; ++j) {
                        const std::size_t base = o * n * inner + j;
                        double dot = 0.0;
                        for (std::size_t i = 0; i < n; ++i)
                            dot += dy[base + i * inner] * yv[base + i * inner];
                        for (std::size_t i = 0; i < n; ++i) {
                            const std::size_t at = base + i * inner;
                            dx[at] += yv[at] * (dy[at] - dot);
                        }
                    }
                }
            },
            out);
    }
    return out;
}

// ---------------------------------------------------------------------------
// concat / slice / reshape
// ---------------------------------------------------------------------------

inline Tensor concat(const std::vector<Tensor>& parts, std::size_t axis) {
    if (parts.empty()) throw ShapeError("concat: no inputs");
    const Shape& first = parts[0].shape();
    detail::check_axis(parts[0], axis, "concat");
    std::size_t total = 0;
    for (const Tensor& p : parts) {
        if (p.rank() != first.size()) {
            throw ShapeError("concat: rank mismatch " + shape_str(p.shape()) + " vs " +
                             shape_str(first));
        }
        for (std::size_t i = 0; i < first.size(); ++i) {
            if (i != axis && p.shape()[i] != first[i]) {
                throw ShapeError("concat: non-concat dim mismatch " + shape_str(p.shape()) +
                                 " vs " + shape_str(first));
            }
        }
        total += p.shape()[axis];
    }
    Shape out_shape = first;
    out_shape[axis] = total;
    const auto [outer, nout, inner] = detail::axis_split(out_shape, axis);
    std::vector<double> y(numel(out_shape));
    std::size_t offset = 0;
    for (const Tensor& p : parts) {
        const std::size_t np = p.shape()[axis];
        const auto& pv = p.values();
        for (std::size_t o = 0; o < outer; ++o) {
            const double* src = &pv[o * np * inner];
            double* dst = &y[(o * nout + offset) * inner];
            std::copy(src, src + np * inner, dst);
        }
        offset += np;
    }
    Tensor out = Tensor::wrap(out_shape, std::move(y));
    bool any_grad = false;
    for (const Tensor& p : parts) any_grad = any_grad || p.requires_grad();
    if (current_tape() && any_grad) {
        out.set_requires_grad(true);
        std::vector<std::size_t> extents(parts.size());
        for (std::size_t i = 0; i < parts.size(); ++i) extents[i] = parts[i].shape()[axis];
        current_tape()->record(
            [parts, out, extents, outer = outer, nout = nout, inner = inner]() {
                // route grad slices back to each input
                const auto& dy = out.grad();
                std::size_t offset = 0;
                for (std::size_t idx = 0; idx < parts.size(); ++idx) {
                    const std::size_t np = extents[idx];
                    if (parts[idx].requires_grad()) {
                        auto& dp = parts[idx].grad();
                        for (std::size_t o = 0; o < outer; ++o) {
                            const double* src = &dy[(o * nout + offset) * inner];
                            double* dst = &dp[o * np * inner];
                            for (std::size_t i = 0; i < np * inner; ++i) dst[i] += src[i];
                        }
                    }
                    offset += np;
                }
            },
            out);
    }
    return out;
}

// Half-open row range [begin, end) along `axis`.
inline Tensor slice(const Tensor& x, std::size_t axis, std::size_t begin, std::size_t end) {
    detail::check_axis(x, axis, "slice");
    const std::size_t n = x.shape()[axis];
    if (begin > end || end > n) {
        throw ShapeError("slice: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                         ") invalid for axis extent " + std::to_string(n));
    }
    Shape out_shape = x.shape();
    out_shape[axis] = end - begin;
    const auto [outer, nin, inner] = detail::axis_split(x.shape(), axis);
    const std::size_t len = end - begin;
    std::vector<double> y(numel(out_shape));
    const auto& xv = x.values();
    for (std::size_t o = 0; o < outer; ++o) {
        const double* src = &xv[(o * nin + begin) * inner];
        std::copy(src, src + len * inner, &y[o * len * inner]);
    }
    Tensor out = Tensor::wrap(out_shape, std::move(y));
    if (detail::grad_wanted(x)) {
        out.set_requires_grad(true);
        current_tape()->record(
            [x, out, outer = outer, nin = nin, inner = inner, begin, len]() {
                const auto& dy = out.grad();
                auto& dx = x.grad();
                for (std::size_t o = 0; o < outer; ++o) {
                    const double* src = &dy[o * len * inner];
                    double* dst = &dx[(o * nin + begin) * inner];
                    for (std::size_t i = 0; i < len * inner; ++i) dst[i] += src[i];
                }
            },
            out);
    }
    return out;
}

inline Tensor reshape(const Tensor& x, Shape shape) {
    if (numel(shape) != x.size()) {
        throw ShapeError("reshape: " + shape_str(x.shape()) + " to " + shape_str(shape) +
                         " changes element count");
    }
    Tensor out = Tensor::wrap(std::move(shape), std::vector<double>(x.values()));
    if (detail::grad_wanted(x)) {
        out.set_requires_grad(true);
        current_tape()->record(
            [x, out]() {
                const auto& dy = out.grad();
                auto& dx = x.grad();
                for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[i];
            },
            out);
    }
    return out;
}

// ---------------------------------------------------------------------------
// reductions
// ---------------------------------------------------------------------------

// Mean along `axis`; the axis is removed from the shape (a rank-1 input
// reduces to shape [1]).
inline Tensor mean(const Tensor& x, std::size_t axis) {
    detail::check_axis(x, axis, "mean");
    const auto [outer, n, inner] = detail::axis_split(x.shape(), axis);
    Shape out_shape;
    for (std::size_t i = 0; i < x.rank(); ++i)
        if (i != axis) out_shape.push_back(x.shape()[i]);
    if (out_shape.empty()) out_shape.push_back(1);
    std::vector<double> y(outer * inner, 0.0);
    const auto& xv = x.values();
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < inner; ++j)
                y[o * inner + j] += xv[(o * n + i) * inner + j] * inv;
    Tensor out = Tensor::wrap(out_shape, std::move(y));
    if (detail::grad_wanted(x)) {
        out.set_requires_grad(true);
        current_tape()->record(
            [x, out, outer = outer, n = n, inner = inner, inv]() {
                const auto& dy = out.grad();
                auto& dx = x.grad();
                for (std::size_t o = 0; o < outer; ++o)
                    for (std::size_t i = 0; i < n; ++i)
                        for (std::size_t j = 0; j < inner; ++j)
                            dx[(o * n + i) * inner + j] += dy[o * inner + j] * inv;
            },
            out);
    }
    return out;
}

// Full reduction to a scalar.
inline Tensor sum(const Tensor& x) {
    double s = 0.0;
    for (double v : x.values()) s += v;
    Tensor out = Tensor::wrap({1}, {s});
    if (detail::grad_wanted(x)) {
        out.set_requires_grad(true);
        current_tape()->record(
            [x, out]() {
                const double g = out.grad()[0];
                auto& dx = x.grad();
                for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += g;
            },
            out);
    }
    return out;
}

// ---------------------------------------------------------------------------
// embedding lookup
// ---------------------------------------------------------------------------

// Gathers rows of `table` [V×d] by id; gradient scatter-adds back into the
// selected rows. Out-of-range ids are input errors.
inline Tensor gather_rows(const Tensor& table, const std::vector<int>& ids) {
    detail::check_2d(table, "gather_rows");
    const std::size_t v = table.rows(), d = table.cols();
    std::vector<double> y(ids.size() * d);
    const auto& tv = table.values();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const int id = ids[i];
        if (id < 0 || static_cast<std::size_t>(id) >= v) {
            throw InputError("gather_rows: id " + std::to_string(id) +
                             " outside table of " + std::to_string(v) + " rows");
        }
        std::copy(&tv[id * d], &tv[id * d] + d, &y[i * d]);
    }
    Tensor out = Tensor::wrap({ids.size(), d}, std::move(y));
    if (detail::grad_wanted(table)) {
        out.set_requires_grad(true);
        current_tape()->record(
            [table, out, ids, d]() {
                const auto& dy = out.grad();
                auto& dt = table.grad();
                for (std::size_t i = 0; i < ids.size(); ++i) {
                    const std::size_t row = static_cast<std::size_t>(ids[i]);
                    for (std::size_t j = 0; j < d; ++j) dt[row * d + j] += dy[i * d + j];
                }
            },
            out);
    }
    return out;
}

// ---------------------------------------------------------------------------
// fused softmax cross-entropy
// ---------------------------------------------------------------------------

// Sum over unmasked rows of -log softmax(logits[i])[targets[i]], computed via
// the log-sum-exp form for stability. An empty mask means all rows count.
// dlogits[i] = g · (softmax(logits[i]) − onehot(targets[i])) for kept rows.
inline Tensor softmax_cross_entropy(const Tensor& logits, const std::vector<int>& targets,
                                    const std::vector<std::uint8_t>& mask = {}) {
    detail::check_2d(logits, "softmax_cross_entropy");
    const std::size_t n = logits.rows(), t = logits.cols();
    if (targets.size() != n) {
        throw ShapeError("softmax_cross_entropy: " + std::to_string(targets.size()) +
                         " targets for " + std::to_string(n) + " rows");
    }
    if (!mask.empty() && mask.size() != n) {
        throw ShapeError("softmax_cross_entropy: mask length mismatch");
    }
    const auto& xv = logits.values();
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!mask.empty() && mask[i] == 0) continue;
        const int tgt = targets[i];
        if (tgt < 0 || static_cast<std::size_t>(tgt) >= t) {
            throw InputError("softmax_cross_entropy: target id " + std::to_string(tgt) +
                             " outside vocab of " + std::to_string(t));
        }
        const double* row = &xv[i * t];
        double mx = row[0];
        for (std::size_t j = 1; j < t; ++j) mx = std::max(mx, row[j]);
        double z = 0.0;
        for (std::size_t j = 0; j < t; ++j) z += std::exp(row[j] - mx);
        loss += mx + std::log(z) - row[tgt];
    }
    Tensor out = Tensor::wrap({1}, {loss});
    if (detail::grad_wanted(logits)) {
        out.set_requires_grad(true);
        current_tape()->record(
            [logits, out, targets, mask, n, t]() {
                const double g = out.grad()[0];
                const auto& xv = logits.values();
                auto& dx = logits.grad();
                for (std::size_t i = 0; i < n; ++i) {
                    if (!mask.empty() && mask[i] == 0) continue;
                    const double* row = &xv[i * t];
                    double mx = row[0];
                    for (std::size_t j = 1; j < t; ++j) mx = std::max(mx, row[j]);
                    double z = 0.0;
                    for (std::size_t j = 0; j < t; ++j) z += std::exp(row[j] - mx);
                    const double inv = 1.0 / z;
                    for (std::size_t j = 0; j < t; ++j) {
                        double p = std::exp(row[j] - mx) * inv;
                        if (j == static_cast<std::size_t>(targets[i])) p -= 1.0;
                        dx[i * t + j] += g * p;
                    }
                }
            },
            out);
    }
    return out;
}

// ---------------------------------------------------------------------------
// non-differentiable helpers
// ---------------------------------------------------------------------------

// Index of the row maximum; ties resolve to the lowest index.
inline std::size_t argmax_row(const Tensor& t, std::size_t row) {
    detail::check_2d(t, "argmax_row");
    const std::size_t n = t.cols();
    const double* v = &t.values()[row * n];
    std::size_t best = 0;
    for (std::size_t j = 1; j < n; ++j)
        if (v[j] > v[best]) best = j;
    return best;
}

}  // namespace hcsa
