#pragma once

#include <string>

#include "hcsa/params.hpp"

namespace hcsa {

// Handles to one GRU cell's tensors, resolved once per sequence.
struct GruCell {
    Tensor wx, b, whz, whr, whc;

    static GruCell from(const ModelParams& p, const std::string& prefix) {
        return GruCell{p.get(prefix + ".wx"), p.get(prefix + ".b"), p.get(prefix + ".whz"),
                       p.get(prefix + ".whr"), p.get(prefix + ".whc")};
    }

    std::size_t hidden() const { return whz.rows(); }

    // x: [1×in], h: [1×hidden] -> [1×hidden].
    //   z = σ(g_z + h·Whz)
    //   r = σ(g_r + h·Whr)
    //   c = tanh(g_c + (r⊗h)·Whc)
    //   h' = (1−z)⊗h + z⊗c
    // with [g_z; g_r; g_c] = x·Wx + b.
    Tensor step(const Tensor& x, const Tensor& h) const {
        const std::size_t hd = hidden();
        Tensor gates = add_rowwise(matmul(x, wx), b);
        Tensor gz = slice(gates, 1, 0, hd);
        Tensor gr = slice(gates, 1, hd, 2 * hd);
        Tensor gc = slice(gates, 1, 2 * hd, 3 * hd);
        Tensor z = sigmoid(add(gz, matmul(h, whz)));
        Tensor r = sigmoid(add(gr, matmul(h, whr)));
        Tensor c = tanh(add(gc, matmul(mul(r, h), whc)));
        Tensor keep = mul(sub(Tensor::scalar(1.0), z), h);
        return add(keep, mul(z, c));
    }
};

}  // namespace hcsa
