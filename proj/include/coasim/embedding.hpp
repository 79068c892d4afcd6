#pragma once

#include "coasim/corpus.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace coasim {

struct Embedding {
    std::string case_id;
    std::vector<float> vector;
    std::string provider_id;
};

struct EmbeddingSet {
    std::string provider_id;
    std::size_t dimension = 0;
    std::map<std::string, Embedding> entries; // case_id -> embedding

    // Throws on dimension mismatch or non-finite values.
    void insert(Embedding e);
};

// Deterministic offline embedding: hashed character-bigram bag over the UTF-8
// bytes, 256 buckets, L2-normalized. Empty text maps to e_0.
constexpr std::size_t kOfflineDim = 256;
std::vector<float> offline_embed(std::string_view text);

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::string id() const = 0;
    virtual std::string model() const = 0;
    virtual std::size_t dimension() const = 0;
    // Texts longer than this are truncated (with a warning) before embedding.
    virtual std::size_t max_chars() const = 0;
    virtual std::vector<std::vector<float>> embed_batch(std::span<const std::string> texts) = 0;
};

std::unique_ptr<EmbeddingProvider> make_offline_provider();

struct RemoteProviderConfig {
    std::string url;       // e.g. http://host:port/v1/embeddings
    std::string model;
    std::string api_token; // sent as Bearer auth when non-empty
    std::size_t dimension = 0;     // 0 = take from first response
    std::size_t batch_size = 128;
    std::size_t max_chars = 32768;
    int max_attempts = 3;
};

// POSTs {"model": ..., "input": [texts]} and expects
// {"data": [{"index": i, "embedding": [...]}]}.
std::unique_ptr<EmbeddingProvider> make_remote_provider(RemoteProviderConfig cfg);

struct EmbedFailure : std::runtime_error {
    std::vector<std::string> failed_case_ids;
    EmbedFailure(const std::string& what, std::vector<std::string> ids)
        : std::runtime_error(what), failed_case_ids(std::move(ids)) {}
};

// Content-addressed cache: <dir>/<first-2-hex>/<hash>.vec (LE float32) plus a
// .json sidecar with dimension/provider/model.
class EmbeddingCache {
public:
    explicit EmbeddingCache(std::string dir) : dir_(std::move(dir)) {}

    static std::string key(const std::string& provider_id, const std::string& model,
                           std::string_view text);
    std::optional<std::vector<float>> load(const std::string& key) const;
    void store(const std::string& key, std::span<const float> vec, const std::string& provider_id,
               const std::string& model, std::size_t dimension) const;

private:
    std::string dir_;
};

// One embedding per case; cache consulted first, updated on miss. Remote
// failures after retries raise EmbedFailure listing the unembedded cases;
// everything fetched before the failure stays cached.
EmbeddingSet embed_claims(std::span<const CaseRecord> cases, EmbeddingProvider& provider,
                          const std::string& cache_dir,
                          const std::function<void(const std::string&)>& warn = {});

} // namespace coasim
