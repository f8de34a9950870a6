#pragma once
// CBOW word embeddings with negative sampling, trained on tokenized notes.
// Single-threaded training is bit-deterministic for a given seed; the
// optional multi-worker mode updates the shared matrices lock-free and is
// documented as nondeterministic.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "notewatch/error.hpp"
#include "notewatch/textnorm.hpp"

namespace notewatch {

struct EmbeddingConfig {
    std::size_t dim = 200;
    std::size_t window = 7;   // max context distance; shrunk uniformly per position
    std::size_t min_count = 5;
    std::size_t epochs = 5;
    std::size_t negative_samples = 5;
    double initial_lr = 0.025;
    double subsample_threshold = 1e-3;  // >= 1 disables subsampling
    std::uint64_t seed = 42;

    void validate() const {
        if (dim < 1) fail("embeddings: dim must be >= 1");
        if (window < 1) fail("embeddings: window must be >= 1");
        if (negative_samples < 1) fail("embeddings: negative_samples must be >= 1");
        if (!(initial_lr > 0.0)) fail("embeddings: initial_lr must be > 0");
        if (epochs < 1) fail("embeddings: epochs must be >= 1");
    }
};

struct EmbeddingTable {
    EmbeddingConfig config;
    std::vector<std::string> tokens;                      // index -> token
    std::unordered_map<std::string, std::size_t> index;   // token -> index
    std::vector<float> vectors;                           // V x dim, row-major
    std::vector<double> epoch_loss;                       // mean objective per epoch

    std::size_t size() const { return tokens.size(); }
    std::span<const float> vector_of(std::size_t i) const {
        return {vectors.data() + i * config.dim, config.dim};
    }
    bool contains(const std::string& token) const { return index.count(token) != 0; }
};

struct Neighbor {
    std::string token;
    double cosine = 0.0;
};

inline double cosine_similarity(std::span<const float> a, std::span<const float> b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace detail {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct CbowVocab {
    std::vector<std::string> tokens;
    std::vector<std::uint64_t> counts;
    std::unordered_map<std::string, std::size_t> index;
    std::uint64_t total = 0;  // occurrences of retained tokens
};

inline CbowVocab build_cbow_vocab(const std::vector<TokenizedNote>& corpus,
                                  std::size_t min_count) {
    std::unordered_map<std::string, std::uint64_t> counts;
    for (const auto& note : corpus)
        for (const auto& sentence : note.sentences)
            for (const auto& tok : sentence.tokens) ++counts[tok.norm];

    std::vector<std::pair<std::string, std::uint64_t>> kept;
    for (auto& [token, count] : counts)
        if (count >= min_count) kept.push_back({token, count});
    // Frequency-descending, then lexicographic: a stable, conventional layout.
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    CbowVocab vocab;
    for (auto& [token, count] : kept) {
        vocab.index[token] = vocab.tokens.size();
        vocab.tokens.push_back(token);
        vocab.counts.push_back(count);
        vocab.total += count;
    }
    return vocab;
}

// Noise distribution: unigram counts raised to the 3/4 power.
struct NoiseSampler {
    std::vector<double> cumulative;
    double total = 0.0;

    explicit NoiseSampler(const std::vector<std::uint64_t>& counts) {
        cumulative.reserve(counts.size());
        for (auto c : counts) {
            total += std::pow(static_cast<double>(c), 0.75);
            cumulative.push_back(total);
        }
    }
    std::size_t draw(std::mt19937_64& rng) const {
        std::uniform_real_distribution<double> u(0.0, total);
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u(rng));
        if (it == cumulative.end()) --it;
        return static_cast<std::size_t>(it - cumulative.begin());
    }
};

struct TrainShared {
    const CbowVocab* vocab = nullptr;
    const EmbeddingConfig* config = nullptr;
    const NoiseSampler* noise = nullptr;
    std::vector<float>* input = nullptr;
    std::vector<float>* output = nullptr;
    std::vector<double>* discard_prob = nullptr;  // per token id; 0 = keep always
    std::uint64_t total_positions = 0;            // epochs * total tokens, for lr decay
};

// Train over a slice of the corpus. Returns (loss sum, example count) and
// advances the shared pre-subsampling position counter used for lr decay.
inline std::pair<double, std::uint64_t> train_slice(
    const TrainShared& shared, const std::vector<TokenizedNote>& corpus,
    std::size_t note_begin, std::size_t note_end, std::mt19937_64& rng,
    std::atomic<std::uint64_t>& processed) {
    const auto& cfg = *shared.config;
    const std::size_t dim = cfg.dim;
    const double lr_floor = cfg.initial_lr / 10000.0;
    float* input = shared.input->data();
    float* output = shared.output->data();

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> shrink(1, cfg.window);
    std::vector<std::size_t> sen;
    std::vector<float> hidden(dim), grad(dim);
    double loss_sum = 0.0;
    std::uint64_t examples = 0;

    for (std::size_t ni = note_begin; ni < note_end; ++ni) {
        for (const auto& sentence : corpus[ni].sentences) {
            sen.clear();
            std::uint64_t in_vocab = 0;
            for (const auto& tok : sentence.tokens) {
                auto it = shared.vocab->index.find(tok.norm);
                if (it == shared.vocab->index.end()) continue;
                ++in_vocab;
                const double p = (*shared.discard_prob)[it->second];
                if (p > 0.0 && unit(rng) < p) continue;
                sen.push_back(it->second);
            }
            const std::uint64_t done = processed.fetch_add(in_vocab) + in_vocab;
            const double frac =
                static_cast<double>(done) / static_cast<double>(shared.total_positions);
            const double lr = std::max(lr_floor, cfg.initial_lr * (1.0 - frac));

            for (std::size_t i = 0; i < sen.size(); ++i) {
                const std::size_t b = shrink(rng);
                const std::size_t lo = i >= b ? i - b : 0;
                const std::size_t hi = std::min(sen.size() - 1, i + b);
                std::size_t context_n = 0;
                std::fill(hidden.begin(), hidden.end(), 0.0f);
                for (std::size_t j = lo; j <= hi; ++j) {
                    if (j == i) continue;
                    const float* v = input + sen[j] * dim;
                    for (std::size_t d = 0; d < dim; ++d) hidden[d] += v[d];
                    ++context_n;
                }
                if (context_n == 0) continue;
                const float inv = 1.0f / static_cast<float>(context_n);
                for (std::size_t d = 0; d < dim; ++d) hidden[d] *= inv;
                std::fill(grad.begin(), grad.end(), 0.0f);

                const std::size_t center = sen[i];
                double example_loss = 0.0;
                for (std::size_t k = 0; k <= cfg.negative_samples; ++k) {
                    std::size_t target;
                    double label;
                    if (k == 0) {
                        target = center;
                        label = 1.0;
                    } else {
                        target = shared.noise->draw(rng);
                        if (target == center) continue;
                        label = 0.0;
                    }
                    float* o = output + target * dim;
                    double dot = 0.0;
                    for (std::size_t d = 0; d < dim; ++d) dot += hidden[d] * o[d];
                    const double s = sigmoid(dot);
                    example_loss -= label == 1.0 ? std::log(std::max(s, 1e-12))
                                                 : std::log(std::max(1.0 - s, 1e-12));
                    const float g = static_cast<float>((label - s) * lr);
                    for (std::size_t d = 0; d < dim; ++d) {
                        grad[d] += g * o[d];
                        o[d] += g * hidden[d];
                    }
                }
                for (std::size_t j = lo; j <= hi; ++j) {
                    if (j == i) continue;
                    float* v = input + sen[j] * dim;
                    for (std::size_t d = 0; d < dim; ++d) v[d] += grad[d];
                }
                loss_sum += example_loss;
                ++examples;
            }
        }
    }
    return {loss_sum, examples};
}

}  // namespace detail

inline EmbeddingTable train_cbow(const std::vector<TokenizedNote>& corpus,
                                 const EmbeddingConfig& config, std::size_t workers = 1) {
    config.validate();
    auto vocab = detail::build_cbow_vocab(corpus, config.min_count);
    if (vocab.tokens.empty())
        fail("embeddings: no token reaches min_count=" + std::to_string(config.min_count));

    const std::size_t v = vocab.tokens.size();
    const std::size_t dim = config.dim;
    std::vector<float> input(v * dim);
    std::vector<float> output(v * dim, 0.0f);
    {
        std::mt19937_64 init_rng(config.seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (auto& x : input)
            x = static_cast<float>((u(init_rng) - 0.5) / static_cast<double>(dim));
    }

    std::vector<double> discard_prob(v, 0.0);
    const double t = config.subsample_threshold;
    if (t > 0.0 && t < 1.0) {
        for (std::size_t i = 0; i < v; ++i) {
            const double f =
                static_cast<double>(vocab.counts[i]) / static_cast<double>(vocab.total);
            if (f > t) discard_prob[i] = 1.0 - std::sqrt(t / f);
        }
    }

    detail::NoiseSampler noise(vocab.counts);
    detail::TrainShared shared;
    shared.vocab = &vocab;
    shared.config = &config;
    shared.noise = &noise;
    shared.input = &input;
    shared.output = &output;
    shared.discard_prob = &discard_prob;
    shared.total_positions =
        std::max<std::uint64_t>(1, config.epochs * std::max<std::uint64_t>(1, vocab.total));

    std::atomic<std::uint64_t> processed{0};
    std::vector<double> epoch_loss;
    if (workers <= 1) {
        std::mt19937_64 rng(config.seed + 1);
        for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
            auto [loss, n] = detail::train_slice(shared, corpus, 0, corpus.size(), rng, processed);
            epoch_loss.push_back(n ? loss / static_cast<double>(n) : 0.0);
        }
    } else {
        for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
            std::atomic<double> loss_total{0.0};
            std::atomic<std::uint64_t> example_total{0};
            std::vector<std::thread> pool;
            const std::size_t per = (corpus.size() + workers - 1) / workers;
            for (std::size_t w = 0; w < workers; ++w) {
                const std::size_t begin = std::min(corpus.size(), w * per);
                const std::size_t end = std::min(corpus.size(), begin + per);
                if (begin >= end) break;
                pool.emplace_back([&, w, begin, end, epoch] {
                    std::mt19937_64 rng(config.seed + 1 + w * 7919 + epoch * 104729);
                    auto [loss, n] =
                        detail::train_slice(shared, corpus, begin, end, rng, processed);
                    double expected = loss_total.load();
                    while (!loss_total.compare_exchange_weak(expected, expected + loss)) {}
                    example_total += n;
                });
            }
            for (auto& th : pool) th.join();
            const auto n = example_total.load();
            epoch_loss.push_back(n ? loss_total.load() / static_cast<double>(n) : 0.0);
        }
    }

    EmbeddingTable table;
    table.config = config;
    table.tokens = std::move(vocab.tokens);
    table.index = std::move(vocab.index);
    table.vectors = std::move(input);
    table.epoch_loss = std::move(epoch_loss);
    return table;
}

// Top-k cosine neighbors of `query`, query itself excluded, ties broken by
// lexicographic token order.
inline std::vector<Neighbor> nearest(const EmbeddingTable& table, const std::string& query,
                                     std::size_t k) {
    if (k < 1) fail("nearest: k must be >= 1");
    auto it = table.index.find(query);
    if (it == table.index.end()) fail("nearest: token \"" + query + "\" not in vocabulary");
    const std::size_t qi = it->second;
    const auto qv = table.vector_of(qi);

    std::vector<Neighbor> all;
    all.reserve(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (i == qi) continue;
        all.push_back({table.tokens[i], cosine_similarity(qv, table.vector_of(i))});
    }
    std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
        if (a.cosine != b.cosine) return a.cosine > b.cosine;
        return a.token < b.token;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

// TSV layout: first line "<V> <dim>", then one row per token:
// token TAB v1 TAB ... TAB v_dim. Components print with enough digits to
// round-trip floats exactly.
inline void save_embeddings_tsv(const EmbeddingTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path + ": cannot open for writing");
    out << table.size() << " " << table.config.dim << "\n";
    char buf[64];
    for (std::size_t i = 0; i < table.size(); ++i) {
        out << table.tokens[i];
        const auto v = table.vector_of(i);
        for (float x : v) {
            std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(x));
            out << "\t" << buf;
        }
        out << "\n";
    }
}

inline EmbeddingTable load_embeddings_tsv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path + ": cannot open file");
    std::string header;
    if (!std::getline(in, header)) fail(path + ": empty embedding file");
    std::istringstream hs(header);
    std::size_t v = 0, dim = 0;
    if (!(hs >> v >> dim) || v == 0 || dim == 0)
        fail(path + ": malformed header (expected \"V dim\")");

    EmbeddingTable table;
    table.config.dim = dim;
    table.vectors.reserve(v * dim);
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string token;
        if (!std::getline(ls, token, '\t'))
            fail(path + ":" + std::to_string(lineno) + ": malformed row");
        std::string cell;
        std::size_t count = 0;
        while (std::getline(ls, cell, '\t')) {
            try {
                table.vectors.push_back(std::stof(cell));
            } catch (const std::exception&) {
                fail(path + ":" + std::to_string(lineno) + ": bad component \"" + cell + "\"");
            }
            ++count;
        }
        if (count != dim)
            fail(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(dim) +
                 " components, got " + std::to_string(count));
        if (!table.index.emplace(token, table.tokens.size()).second)
            fail(path + ":" + std::to_string(lineno) + ": duplicate token \"" + token + "\"");
        table.tokens.push_back(token);
    }
    if (table.tokens.size() != v)
        fail(path + ": header claims " + std::to_string(v) + " rows, found " +
             std::to_string(table.tokens.size()));
    return table;
}

}  // namespace notewatch
