#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hcsa/data.hpp"
#include "hcsa/params.hpp"

namespace hcsa {

inline constexpr std::uint32_t checkpoint_version = 1;

// Model persistence. Layout (all integers little-endian):
//   magic "HCSM", u32 version,
//   u32 config_len, config JSON bytes,
//   u64 training_step,
//   u32 tensor_count, then per tensor:
//     u32 name_len, name bytes, u32 rank, u32 dims..., f32 values row-major.
// Values are stored as 32-bit floats; loading reproduces a model whose
// inference outputs are bitwise stable at that precision.
struct Checkpoint {
    std::string config_json;
    std::uint64_t training_step = 0;
    std::vector<std::pair<std::string, Tensor>> tensors;
};

namespace detail {

inline void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

struct ByteReader {
    const unsigned char* p;
    std::size_t remaining;
    std::string origin;

    void need(std::size_t n) const {
        if (remaining < n) {
            throw DataError(DataError::Kind::truncated, origin + ": checkpoint truncated");
        }
    }
    std::uint32_t u32() {
        need(4);
        const std::uint32_t v = data::detail::get_u32(p);
        p += 4;
        remaining -= 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        const std::uint64_t v = get_u64(p);
        p += 8;
        remaining -= 8;
        return v;
    }
    float f32() {
        need(4);
        const float v = data::detail::get_f32(p);
        p += 4;
        remaining -= 4;
        return v;
    }
    std::string bytes(std::size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(p), n);
        p += n;
        remaining -= n;
        return s;
    }
};

}  // namespace detail

inline std::string encode_checkpoint(const Checkpoint& ckpt) {
    std::string out = "HCSM";
    data::detail::put_u32(out, checkpoint_version);
    data::detail::put_u32(out, static_cast<std::uint32_t>(ckpt.config_json.size()));
    out += ckpt.config_json;
    detail::put_u64(out, ckpt.training_step);
    data::detail::put_u32(out, static_cast<std::uint32_t>(ckpt.tensors.size()));
    for (const auto& [name, t] : ckpt.tensors) {
        data::detail::put_u32(out, static_cast<std::uint32_t>(name.size()));
        out += name;
        data::detail::put_u32(out, static_cast<std::uint32_t>(t.rank()));
        for (std::size_t d : t.shape()) data::detail::put_u32(out, static_cast<std::uint32_t>(d));
        for (double v : t.values()) data::detail::put_f32(out, static_cast<float>(v));
    }
    return out;
}

inline Checkpoint decode_checkpoint(const std::string& bytes, const std::string& origin) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), "HCSM", 4) != 0) {
        throw DataError(DataError::Kind::corrupt_header,
                        origin + ": not a checkpoint (bad magic)");
    }
    detail::ByteReader r{reinterpret_cast<const unsigned char*>(bytes.data()) + 4,
                         bytes.size() - 4, origin};
    const std::uint32_t version = r.u32();
    if (version != checkpoint_version) {
        throw DataError(DataError::Kind::version_mismatch,
                        origin + ": checkpoint version " + std::to_string(version) +
                            ", expected " + std::to_string(checkpoint_version));
    }
    Checkpoint ckpt;
    const std::uint32_t config_len = r.u32();
    ckpt.config_json = r.bytes(config_len);
    ckpt.training_step = r.u64();
    const std::uint32_t count = r.u32();
    ckpt.tensors.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t name_len = r.u32();
        std::string name = r.bytes(name_len);
        const std::uint32_t rank = r.u32();
        Shape shape(rank);
        std::size_t n = 1;
        for (std::uint32_t d = 0; d < rank; ++d) {
            shape[d] = r.u32();
            n *= shape[d];
        }
        std::vector<double> values(n);
        for (std::size_t j = 0; j < n; ++j) values[j] = static_cast<double>(r.f32());
        ckpt.tensors.emplace_back(std::move(name), Tensor::wrap(std::move(shape), std::move(values)));
    }
    return ckpt;
}

inline void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("save_checkpoint: cannot write " + path.string());
    const std::string bytes = encode_checkpoint(ckpt);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InputError("save_checkpoint: failed writing " + path.string());
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("load_checkpoint: cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_checkpoint(bytes, path.string());
}

// Copies checkpoint tensors into a freshly built parameter set. Every tensor
// must match the destination parameter's shape; extra or missing tensors are
// shape mismatches of the persisted model against the config.
inline void apply_checkpoint(ModelParams& params, const Checkpoint& ckpt) {
    if (ckpt.tensors.size() != params.named.size()) {
        throw DataError(DataError::Kind::shape_mismatch,
                        "checkpoint holds " + std::to_string(ckpt.tensors.size()) +
                            " tensors, model expects " + std::to_string(params.named.size()));
    }
    for (const auto& [name, tensor] : ckpt.tensors) {
        if (!params.has(name)) {
            throw DataError(DataError::Kind::shape_mismatch,
                            "checkpoint tensor '" + name + "' not present in model");
        }
        Tensor& dst = params.get(name);
        if (dst.shape() != tensor.shape()) {
            throw DataError(DataError::Kind::shape_mismatch,
                            "checkpoint tensor '" + name + "' has shape " +
                                shape_str(tensor.shape()) + ", model expects " +
                                shape_str(dst.shape()));
        }
        dst.values() = tensor.values();
    }
}

inline Checkpoint checkpoint_from_params(const ModelParams& params, std::string config_json,
                                         std::uint64_t step) {
    Checkpoint ckpt;
    ckpt.config_json = std::move(config_json);
    ckpt.training_step = step;
    ckpt.tensors = params.named;
    return ckpt;
}

}  // namespace hcsa
