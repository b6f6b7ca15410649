#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hcsa/errors.hpp"
#include "hcsa/log.hpp"

namespace hcsa::metrics {

// Fixed tokenization for all metric computations: lowercase, strip
// punctuation, split on whitespace.
inline std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char raw : text) {
        const auto c = static_cast<unsigned char>(raw);
        if (std::isspace(c)) {
            if (!cur.empty()) tokens.push_back(std::exchange(cur, {}));
        } else if (!std::ispunct(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

// ---------------------------------------------------------------------------
// word similarity oracle
// ---------------------------------------------------------------------------

// Pluggable word-similarity source. Exact mode scores 1 on equality only;
// synonym mode additionally scores 1 on listed pairs; taxonomy mode computes
// Wu-Palmer similarity 2·depth(LCS) / (depth(a) + depth(b)) over a parent
// tree, scoring 0 for out-of-taxonomy words.
class SimilarityOracle {
public:
    enum class Mode { exact, synonym_table, taxonomy };

    static SimilarityOracle exact() { return SimilarityOracle(Mode::exact); }

    static SimilarityOracle with_synonyms(const std::vector<std::pair<std::string, std::string>>& pairs) {
        SimilarityOracle o(Mode::synonym_table);
        for (const auto& [a, b] : pairs) {
            o.synonyms_.insert(a + "\t" + b);
            o.synonyms_.insert(b + "\t" + a);
        }
        return o;
    }

    // Lines of "a<TAB>b".
    static SimilarityOracle synonyms_from_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw InputError("cannot open synonym file " + path.string());
        std::vector<std::pair<std::string, std::string>> pairs;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            const auto tab = line.find('\t');
            if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
                throw DataError(DataError::Kind::corrupt_header,
                                path.string() + ":" + std::to_string(lineno) +
                                    ": expected 'a<TAB>b'");
            }
            pairs.emplace_back(line.substr(0, tab), line.substr(tab + 1));
        }
        return with_synonyms(pairs);
    }

    static SimilarityOracle with_taxonomy(const std::vector<std::pair<std::string, std::string>>& child_parent) {
        SimilarityOracle o(Mode::taxonomy);
        for (const auto& [child, parent] : child_parent) o.parent_[child] = parent;
        o.validate_taxonomy();
        return o;
    }

    // Lines of "term<TAB>parent". A term whose parent equals itself (or whose
    // parent has no entry) tops out the tree; the topmost node has depth 1.
    static SimilarityOracle taxonomy_from_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw InputError("cannot open taxonomy file " + path.string());
        std::vector<std::pair<std::string, std::string>> entries;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#') continue;
            const auto tab = line.find('\t');
            if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
                throw DataError(DataError::Kind::corrupt_header,
                                path.string() + ":" + std::to_string(lineno) +
                                    ": expected 'term<TAB>parent'");
            }
            entries.emplace_back(line.substr(0, tab), line.substr(tab + 1));
        }
        return with_taxonomy(entries);
    }

    Mode mode() const { return mode_; }

    // Similarity in [0, 1]; symmetric; similarity(a, a) = 1 for any a.
    double similarity(const std::string& a, const std::string& b) const {
        if (a == b) return 1.0;
        switch (mode_) {
            case Mode::exact:
                return 0.0;
            case Mode::synonym_table:
                return synonyms_.count(a + "\t" + b) ? 1.0 : 0.0;
            case Mode::taxonomy: {
                const auto chain_a = ancestor_chain(a);
                const auto chain_b = ancestor_chain(b);
                if (chain_a.empty() || chain_b.empty()) return 0.0;
                // chains run root -> term; depth = position + 1
                std::size_t common = 0;
                while (common < chain_a.size() && common < chain_b.size() &&
                       chain_a[common] == chain_b[common]) {
                    ++common;
                }
                if (common == 0) return 0.0;
                const double lcs_depth = static_cast<double>(common);
                const double da = static_cast<double>(chain_a.size());
                const double db = static_cast<double>(chain_b.size());
                return 2.0 * lcs_depth / (da + db);
            }
        }
        return 0.0;
    }

private:
    explicit SimilarityOracle(Mode mode) : mode_(mode) {}

    void validate_taxonomy() const {
        for (const auto& [child, parent] : parent_) {
            ancestor_chain(child);  // throws on cycles
        }
    }

    // Root-first path including the term; empty if the term is not in the
    // taxonomy at all.
    std::vector<std::string> ancestor_chain(const std::string& term) const {
        if (!parent_.count(term) && !is_parent_of_something(term)) return {};
        std::vector<std::string> chain;
        std::string cur = term;
        std::unordered_set<std::string> seen;
        while (true) {
            if (!seen.insert(cur).second) {
                throw DataError(DataError::Kind::corrupt_header,
                                "taxonomy cycle at '" + cur + "'");
            }
            chain.push_back(cur);
            auto it = parent_.find(cur);
            if (it == parent_.end() || it->second == cur) break;
            cur = it->second;
        }
        std::reverse(chain.begin(), chain.end());
        return chain;
    }

    bool is_parent_of_something(const std::string& term) const {
        for (const auto& [child, parent] : parent_) {
            if (parent == term) return true;
        }
        return false;
    }

    Mode mode_;
    std::unordered_set<std::string> synonyms_;
    std::unordered_map<std::string, std::string> parent_;
};

// ---------------------------------------------------------------------------
// WUPS
// ---------------------------------------------------------------------------

inline double wup_similarity(const std::string& a, const std::string& b,
                             const SimilarityOracle& oracle) {
    return oracle.similarity(a, b);
}

// Thresholded similarity: the raw score when it reaches γ, otherwise the
// score scaled by 0.1.
inline double wup_gamma(const std::string& a, const std::string& b, double gamma,
                        const SimilarityOracle& oracle) {
    if (gamma < 0.0 || gamma > 1.0) throw ConfigError("wup_gamma: gamma must be in [0, 1]");
    const double s = oracle.similarity(a, b);
    return s >= gamma ? s : 0.1 * s;
}

// Per-question score: min over both directions of the mean (over that side's
// tokens) of the best thresholded similarity against the other side. Each
// mean normalizes by its own sequence length.
inline double wups_question(const std::vector<std::string>& prediction,
                            const std::vector<std::string>& reference, double gamma,
                            const SimilarityOracle& oracle) {
    if (prediction.empty() || reference.empty()) return 0.0;
    auto directed = [&](const std::vector<std::string>& from,
                        const std::vector<std::string>& to) {
        double total = 0.0;
        for (const auto& a : from) {
            double best = 0.0;
            for (const auto& b : to) best = std::max(best, wup_gamma(a, b, gamma, oracle));
            total += best;
        }
        return total / static_cast<double>(from.size());
    };
    return std::min(directed(reference, prediction), directed(prediction, reference));
}

// Corpus score: mean of per-question scores. An empty answer on either side
// scores that question 0 (and logs it).
inline double wups(const std::vector<std::vector<std::string>>& predictions,
                   const std::vector<std::vector<std::string>>& references, double gamma,
                   const SimilarityOracle& oracle) {
    if (predictions.empty() || predictions.size() != references.size()) {
        throw InputError("wups: prediction/reference lists must be nonempty and aligned");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i].empty() || references[i].empty()) {
            log::warn("wups: empty answer at index " + std::to_string(i) + ", scoring 0");
            continue;
        }
        total += wups_question(predictions[i], references[i], gamma, oracle);
    }
    return total / static_cast<double>(predictions.size());
}

// ---------------------------------------------------------------------------
// BLEU-1
// ---------------------------------------------------------------------------

// Clipped unigram precision times brevity penalty min(1, exp(1 − r/c)).
// An empty prediction scores 0.
inline double bleu1_sentence(const std::vector<std::string>& prediction,
                             const std::vector<std::string>& reference) {
    if (reference.empty()) throw InputError("bleu1: empty reference");
    if (prediction.empty()) return 0.0;
    std::unordered_map<std::string, int> ref_counts;
    for (const auto& w : reference) ref_counts[w] += 1;
    int matched = 0;
    for (const auto& w : prediction) {
        auto it = ref_counts.find(w);
        if (it != ref_counts.end() && it->second > 0) {
            ++matched;
            it->second -= 1;
        }
    }
    const double precision = static_cast<double>(matched) / static_cast<double>(prediction.size());
    const double c = static_cast<double>(prediction.size());
    const double r = static_cast<double>(reference.size());
    const double bp = std::min(1.0, std::exp(1.0 - r / c));
    return precision * bp;
}

inline double bleu1(const std::vector<std::vector<std::string>>& predictions,
                    const std::vector<std::vector<std::string>>& references) {
    if (predictions.empty() || predictions.size() != references.size()) {
        throw InputError("bleu1: prediction/reference lists must be nonempty and aligned");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        total += bleu1_sentence(predictions[i], references[i]);
    }
    return total / static_cast<double>(predictions.size());
}

// ---------------------------------------------------------------------------
// corpus evaluation
// ---------------------------------------------------------------------------

struct ScoredAnswerSet {
    std::vector<std::vector<std::string>> predictions;
    std::vector<std::vector<std::string>> references;
};

struct TypeScores {
    double bleu1 = 0.0;
    double wups_0 = 0.0;
    double wups_9 = 0.0;
    std::size_t count = 0;
};

struct EvalReport {
    double bleu1 = 0.0;
    double wups_0 = 0.0;   // WUPS@0.0
    double wups_9 = 0.0;   // WUPS@0.9
    std::size_t sample_count = 0;
    std::map<std::string, TypeScores> by_type;
};

struct EvalItem {
    std::string id;
    std::string prediction;
    std::string reference;
    std::string type;
};

inline EvalReport evaluate(const std::vector<EvalItem>& items, const SimilarityOracle& oracle) {
    if (items.empty()) throw InputError("evaluate: no items");
    ScoredAnswerSet all;
    std::map<std::string, ScoredAnswerSet> grouped;
    for (const auto& item : items) {
        auto pred = tokenize(item.prediction);
        auto ref = tokenize(item.reference);
        all.predictions.push_back(pred);
        all.references.push_back(ref);
        auto& g = grouped[item.type.empty() ? "unknown" : item.type];
        g.predictions.push_back(std::move(pred));
        g.references.push_back(std::move(ref));
    }

    auto score = [&](const ScoredAnswerSet& s) {
        TypeScores t;
        t.count = s.predictions.size();
        t.bleu1 = bleu1(s.predictions, s.references);
        t.wups_0 = wups(s.predictions, s.references, 0.0, oracle);
        t.wups_9 = wups(s.predictions, s.references, 0.9, oracle);
        return t;
    };

    const TypeScores overall = score(all);
    EvalReport report;
    report.bleu1 = overall.bleu1;
    report.wups_0 = overall.wups_0;
    report.wups_9 = overall.wups_9;
    report.sample_count = items.size();
    for (const auto& [type, set] : grouped) report.by_type[type] = score(set);
    return report;
}

}  // namespace hcsa::metrics
