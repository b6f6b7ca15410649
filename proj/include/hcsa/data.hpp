#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "hcsa/config.hpp"
#include "hcsa/log.hpp"
#include "hcsa/tensor.hpp"

namespace hcsa::data {

// ---------------------------------------------------------------------------
// vocabulary
// ---------------------------------------------------------------------------

struct Vocabulary {
    std::vector<std::string> words;
    std::unordered_map<std::string, int> ids;
    int unk_id = 0;

    int id_or_unk(const std::string& w) const {
        auto it = ids.find(w);
        return it == ids.end() ? unk_id : it->second;
    }
    const std::string& word(int id) const { return words.at(static_cast<std::size_t>(id)); }
    std::size_t size() const { return words.size(); }

    static Vocabulary from_words(std::vector<std::string> list, int unk) {
        Vocabulary v;
        v.words = std::move(list);
        v.unk_id = unk;
        for (std::size_t i = 0; i < v.words.size(); ++i) v.ids[v.words[i]] = static_cast<int>(i);
        return v;
    }
};

inline constexpr std::size_t max_event_types = 16;

// Fixed template vocabulary for question phrasing. Stable across runs so
// datasets, checkpoints and predictions always agree on token ids.
inline const Vocabulary& question_vocab() {
    static const Vocabulary v = [] {
        std::vector<std::string> words = {
            "<pad>", "<unk>",
            "what", "which", "event", "occurs", "happens", "after", "before", "follows",
            "following", "comes", "next", "then", "first", "second", "third", "last",
            "in", "the", "video", "clip", "scene", "segment", "sequence", "frame",
            "does", "do", "is", "was", "begin", "begins", "end", "ends", "start",
            "starts", "show", "shows", "appear", "appears", "action", "activity",
            "moment", "time", "when", "where", "prior", "previous", "earlier", "later",
        };
        for (std::size_t e = 0; e < max_event_types; ++e) words.push_back("e" + std::to_string(e));
        return Vocabulary::from_words(std::move(words), 1);
    }();
    return v;
}

inline const Vocabulary& answer_vocab() {
    static const Vocabulary v = [] {
        std::vector<std::string> words = {"<bos>", "<eos>", "<pad>", "<unk>", "nothing",
                                          "unknown"};
        for (std::size_t e = 0; e < max_event_types; ++e) words.push_back("e" + std::to_string(e));
        return Vocabulary::from_words(std::move(words), token::unk);
    }();
    return v;
}

// ---------------------------------------------------------------------------
// samples
// ---------------------------------------------------------------------------

struct Sample {
    std::string id;
    Tensor features;            // [n × d_v]
    std::vector<int> question;  // token ids, length m >= 1
    std::vector<int> answer;    // content token ids, length r >= 1 (no EOS)
    std::string type;
};

struct SyntheticTaskConfig {
    std::size_t sequence_length = 48;  // n
    std::size_t feature_dim = 32;      // d_v
    std::size_t event_types = 5;       // E
    std::size_t events_per_sequence = 3;
    double noise_sigma = 0.3;
    std::uint64_t seed = 1;
    // First sample index. Event prototypes depend only on the seed, so
    // disjoint index ranges of one seed form train/held-out splits of the
    // same task.
    std::size_t index_offset = 0;

    void validate() const {
        if (event_types < 2) throw ConfigError("event_types must be >= 2");
        if (event_types > max_event_types) {
            throw ConfigError("event_types must be <= " + std::to_string(max_event_types));
        }
        if (events_per_sequence < 2) throw ConfigError("events_per_sequence must be >= 2");
        if (events_per_sequence > event_types) {
            throw ConfigError("events_per_sequence must be <= event_types (distinct events)");
        }
        if (feature_dim < 1) throw ConfigError("feature_dim must be >= 1");
        if (sequence_length < events_per_sequence * 8) {
            throw ConfigError("sequence_length " + std::to_string(sequence_length) +
                              " cannot place " + std::to_string(events_per_sequence) +
                              " events of up to 8 positions");
        }
        if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be >= 0");
    }
};

namespace detail {

inline std::vector<std::vector<double>> event_prototypes(const SyntheticTaskConfig& cfg) {
    std::mt19937_64 rng(~cfg.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<std::vector<double>> protos(cfg.event_types,
                                            std::vector<double>(cfg.feature_dim));
    for (auto& proto : protos)
        for (double& v : proto) v = dist(rng);
    return protos;
}

}  // namespace detail

// Plants ordered events (prototype vectors plus Gaussian noise, over spans of
// 4-8 positions) into a Gaussian noise background. The question asks which
// event follows a planted event; the answer names the next event's type.
// Per-sample seeds derive as seed ⊕ index, so generation is order- and
// thread-independent.
inline std::vector<Sample> generate_synthetic_dataset(const SyntheticTaskConfig& cfg,
                                                      std::size_t count) {
    cfg.validate();
    const auto protos = detail::event_prototypes(cfg);
    const Vocabulary& qv = question_vocab();
    const Vocabulary& av = answer_vocab();

    std::vector<Sample> samples;
    samples.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t idx = cfg.index_offset + i;
        std::mt19937_64 rng(cfg.seed ^ static_cast<std::uint64_t>(idx));
        std::normal_distribution<double> noise(0.0, 1.0);

        const std::size_t n = cfg.sequence_length;
        const std::size_t dv = cfg.feature_dim;
        std::vector<double> features(n * dv, 0.0);
        if (cfg.noise_sigma > 0.0) {
            for (double& v : features) v = noise(rng) * cfg.noise_sigma;
        }

        // distinct event types in planted order
        std::vector<int> types(cfg.event_types);
        std::iota(types.begin(), types.end(), 0);
        std::shuffle(types.begin(), types.end(), rng);
        types.resize(cfg.events_per_sequence);

        // span lengths, then left-to-right placement with feasible slack
        const std::size_t planted = cfg.events_per_sequence;
        std::uniform_int_distribution<std::size_t> span_dist(4, 8);
        std::vector<std::size_t> spans(planted);
        for (auto& s : spans) s = span_dist(rng);
        std::vector<std::size_t> starts(planted);
        std::size_t cursor = 0;
        for (std::size_t e = 0; e < planted; ++e) {
            std::size_t remaining = 0;
            for (std::size_t q = e; q < planted; ++q) remaining += spans[q];
            std::uniform_int_distribution<std::size_t> pos(cursor, n - remaining);
            starts[e] = pos(rng);
            cursor = starts[e] + spans[e];
        }
        for (std::size_t e = 0; e < planted; ++e) {
            const auto& proto = protos[static_cast<std::size_t>(types[e])];
            for (std::size_t t = starts[e]; t < starts[e] + spans[e]; ++t) {
                for (std::size_t j = 0; j < dv; ++j) {
                    const double jitter = cfg.noise_sigma > 0.0 ? noise(rng) * cfg.noise_sigma
                                                                : 0.0;
                    features[t * dv + j] = proto[j] + jitter;
                }
            }
        }

        std::uniform_int_distribution<std::size_t> ask_dist(0, planted - 2);
        const std::size_t ask = ask_dist(rng);
        const std::string asked = "e" + std::to_string(types[ask]);
        const std::string next = "e" + std::to_string(types[ask + 1]);

        Sample s;
        s.id = "sample_" + std::to_string(idx);
        s.features = Tensor::wrap({n, dv}, std::move(features));
        s.question = {qv.id_or_unk("what"), qv.id_or_unk("event"), qv.id_or_unk("occurs"),
                      qv.id_or_unk("after"), qv.id_or_unk(asked)};
        s.answer = {av.id_or_unk(next)};
        s.type = "synthetic";
        samples.push_back(std::move(s));
    }
    return samples;
}

// ---------------------------------------------------------------------------
// binary feature files
// ---------------------------------------------------------------------------

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline void put_f32(std::string& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

inline std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline float get_f32(const unsigned char* p) {
    const std::uint32_t bits = get_u32(p);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

}  // namespace detail

inline constexpr std::uint32_t feature_file_version = 1;

// Layout: magic "HCSF", u32 version, u32 n, u32 d_v, then n·d_v little-endian
// 32-bit floats, row-major.
inline std::string encode_feature_file(const Tensor& features) {
    std::string out = "HCSF";
    detail::put_u32(out, feature_file_version);
    detail::put_u32(out, static_cast<std::uint32_t>(features.rows()));
    detail::put_u32(out, static_cast<std::uint32_t>(features.cols()));
    for (double v : features.values()) detail::put_f32(out, static_cast<float>(v));
    return out;
}

inline Tensor decode_feature_file(const std::string& bytes, const std::string& origin) {
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    if (bytes.size() < 16 || std::memcmp(bytes.data(), "HCSF", 4) != 0) {
        throw DataError(DataError::Kind::corrupt_header,
                        origin + ": not a feature file (bad magic)");
    }
    const std::uint32_t version = detail::get_u32(p + 4);
    if (version != feature_file_version) {
        throw DataError(DataError::Kind::version_mismatch,
                        origin + ": feature file version " + std::to_string(version) +
                            ", expected " + std::to_string(feature_file_version));
    }
    const std::size_t n = detail::get_u32(p + 8);
    const std::size_t dv = detail::get_u32(p + 12);
    if (n == 0 || dv == 0) {
        throw DataError(DataError::Kind::shape_mismatch, origin + ": zero-sized feature matrix");
    }
    if (bytes.size() != 16 + 4 * n * dv) {
        throw DataError(DataError::Kind::truncated,
                        origin + ": expected " + std::to_string(16 + 4 * n * dv) + " bytes, got " +
                            std::to_string(bytes.size()));
    }
    std::vector<double> values(n * dv);
    for (std::size_t i = 0; i < n * dv; ++i) {
        values[i] = static_cast<double>(detail::get_f32(p + 16 + 4 * i));
    }
    Tensor t = Tensor::wrap({n, dv}, std::move(values));
    if (!t.all_finite()) {
        throw DataError(DataError::Kind::corrupt_header, origin + ": non-finite feature values");
    }
    return t;
}

// ---------------------------------------------------------------------------
// dataset directory (manifest.jsonl + features/*.hcsf + references.jsonl)
// ---------------------------------------------------------------------------

inline void save_dataset(const std::vector<Sample>& samples, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "features");
    const Vocabulary& qv = question_vocab();
    const Vocabulary& av = answer_vocab();

    std::ofstream manifest(dir / "manifest.jsonl");
    std::ofstream refs(dir / "references.jsonl");
    if (!manifest || !refs) throw InputError("save_dataset: cannot write to " + dir.string());
    for (const Sample& s : samples) {
        const std::string feature_rel = "features/" + s.id + ".hcsf";
        std::ofstream feat(dir / feature_rel, std::ios::binary);
        const std::string bytes = encode_feature_file(s.features);
        feat.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!feat) throw InputError("save_dataset: failed writing " + feature_rel);

        nlohmann::ordered_json line;
        line["id"] = s.id;
        line["features_file"] = feature_rel;
        nlohmann::ordered_json q = nlohmann::ordered_json::array();
        for (int id : s.question) q.push_back(qv.word(id));
        line["question"] = q;
        nlohmann::ordered_json a = nlohmann::ordered_json::array();
        std::string joined;
        for (std::size_t i = 0; i < s.answer.size(); ++i) {
            a.push_back(av.word(s.answer[i]));
            if (i) joined += " ";
            joined += av.word(s.answer[i]);
        }
        line["answer"] = a;
        line["type"] = s.type;
        manifest << line.dump() << "\n";

        nlohmann::ordered_json ref;
        ref["id"] = s.id;
        ref["answer"] = joined;
        ref["type"] = s.type;
        refs << ref.dump() << "\n";
    }
}

inline std::vector<Sample> load_dataset(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    const fs::path manifest_path = dir / "manifest.jsonl";
    std::ifstream manifest(manifest_path);
    if (!manifest) throw InputError("load_dataset: cannot open " + manifest_path.string());
    const Vocabulary& qv = question_vocab();
    const Vocabulary& av = answer_vocab();

    static const std::vector<std::string> known_keys = {"id", "features_file", "question",
                                                        "answer", "type"};
    std::vector<Sample> samples;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(manifest, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(DataError::Kind::corrupt_manifest,
                            manifest_path.string() + ":" + std::to_string(lineno) + ": " +
                                e.what());
        }
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (std::find(known_keys.begin(), known_keys.end(), it.key()) == known_keys.end()) {
                log::warn("manifest line " + std::to_string(lineno) + ": ignoring unknown field '" +
                          it.key() + "'");
            }
        }
        for (const char* key : {"id", "features_file", "question", "answer"}) {
            if (!j.contains(key)) {
                throw DataError(DataError::Kind::corrupt_manifest,
                                manifest_path.string() + ":" + std::to_string(lineno) +
                                    ": missing field '" + std::string(key) + "'");
            }
        }

        Sample s;
        s.id = j["id"].get<std::string>();
        s.type = j.value("type", "unknown");
        for (const auto& w : j["question"]) {
            s.question.push_back(qv.id_or_unk(w.get<std::string>()));
        }
        for (const auto& w : j["answer"]) {
            s.answer.push_back(av.id_or_unk(w.get<std::string>()));
        }
        if (s.question.empty() || s.answer.empty()) {
            throw DataError(DataError::Kind::corrupt_manifest,
                            manifest_path.string() + ":" + std::to_string(lineno) +
                                ": empty question or answer");
        }

        const fs::path feat_path = dir / j["features_file"].get<std::string>();
        std::ifstream feat(feat_path, std::ios::binary);
        if (!feat) throw InputError("load_dataset: cannot open " + feat_path.string());
        std::string bytes((std::istreambuf_iterator<char>(feat)),
                          std::istreambuf_iterator<char>());
        s.features = decode_feature_file(bytes, feat_path.string());
        samples.push_back(std::move(s));
    }
    if (!samples.empty()) {
        const std::size_t dv = samples[0].features.cols();
        for (const Sample& s : samples) {
            if (s.features.cols() != dv) {
                throw DataError(DataError::Kind::shape_mismatch,
                                "load_dataset: sample " + s.id + " has feature width " +
                                    std::to_string(s.features.cols()) + ", dataset uses " +
                                    std::to_string(dv));
            }
        }
    }
    return samples;
}

// ---------------------------------------------------------------------------
// downsampling
// ---------------------------------------------------------------------------

// Uniform stride selection of exactly max_len rows (indices floor(i·n/max_len))
// when the sequence is overlong; identity otherwise.
inline Tensor downsample(const Tensor& features, std::size_t max_len) {
    const std::size_t n = features.rows();
    if (n <= max_len) return features;
    const std::size_t dv = features.cols();
    std::vector<double> out(max_len * dv);
    const auto& fv = features.values();
    for (std::size_t i = 0; i < max_len; ++i) {
        const std::size_t row = i * n / max_len;
        std::copy(&fv[row * dv], &fv[row * dv] + dv, &out[i * dv]);
    }
    return Tensor::wrap({max_len, dv}, std::move(out));
}

}  // namespace hcsa::data
