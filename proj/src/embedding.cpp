#include "coasim/embedding.hpp"

#include "coasim/util.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include <httplib.h>

namespace coasim {

using nlohmann::json;
namespace fs = std::filesystem;

void EmbeddingSet::insert(Embedding e) {
    if (entries.empty() && dimension == 0) dimension = e.vector.size();
    if (e.vector.size() != dimension)
        throw std::runtime_error("embedding dimension mismatch for case " + e.case_id);
    for (float v : e.vector)
        if (!std::isfinite(v)) throw std::runtime_error("non-finite embedding for case " + e.case_id);
    entries[e.case_id] = std::move(e);
}

std::vector<float> offline_embed(std::string_view text) {
    std::vector<float> v(kOfflineDim, 0.0f);
    if (text.empty()) {
        v[0] = 1.0f;
        return v;
    }
    // fixed seed keeps buckets stable across runs and platforms
    constexpr std::uint64_t kSeed = 0x9e3779b97f4a7c15ull;
    for (std::size_t i = 0; i + 1 < text.size(); ++i)
        v[fnv1a64(text.substr(i, 2), kSeed) % kOfflineDim] += 1.0f;
    if (text.size() == 1) v[fnv1a64(text, kSeed) % kOfflineDim] += 1.0f;
    double norm = 0.0;
    for (float x : v) norm += static_cast<double>(x) * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) {
        v[0] = 1.0f;
        return v;
    }
    for (float& x : v) x = static_cast<float>(x / norm);
    return v;
}

namespace {

class OfflineProvider final : public EmbeddingProvider {
public:
    std::string id() const override { return "offline"; }
    std::string model() const override { return "bigram-hash-256"; }
    std::size_t dimension() const override { return kOfflineDim; }
    std::size_t max_chars() const override { return 1 << 20; }
    std::vector<std::vector<float>> embed_batch(std::span<const std::string> texts) override {
        std::vector<std::vector<float>> out;
        out.reserve(texts.size());
        for (const auto& t : texts) out.push_back(offline_embed(t));
        return out;
    }
};

class RemoteProvider final : public EmbeddingProvider {
public:
    explicit RemoteProvider(RemoteProviderConfig cfg) : cfg_(std::move(cfg)) {
        // split url into scheme://host[:port] and path
        auto scheme_end = cfg_.url.find("://");
        if (scheme_end == std::string::npos) throw std::runtime_error("bad service url: " + cfg_.url);
        auto path_start = cfg_.url.find('/', scheme_end + 3);
        if (path_start == std::string::npos) {
            base_ = cfg_.url;
            path_ = "/";
        } else {
            base_ = cfg_.url.substr(0, path_start);
            path_ = cfg_.url.substr(path_start);
        }
    }

    std::string id() const override { return "remote"; }
    std::string model() const override { return cfg_.model; }
    std::size_t dimension() const override { return cfg_.dimension; }
    std::size_t max_chars() const override { return cfg_.max_chars; }

    std::vector<std::vector<float>> embed_batch(std::span<const std::string> texts) override {
        json body;
        body["model"] = cfg_.model;
        body["input"] = std::vector<std::string>(texts.begin(), texts.end());
        std::string payload = body.dump();

        std::string last_error;
        for (int attempt = 0; attempt < cfg_.max_attempts; ++attempt) {
            if (attempt > 0)
                std::this_thread::sleep_for(std::chrono::milliseconds(100 << (attempt - 1)));
            httplib::Client client(base_);
            client.set_read_timeout(60, 0);
            httplib::Headers headers;
            if (!cfg_.api_token.empty())
                headers.emplace("Authorization", "Bearer " + cfg_.api_token);
            auto res = client.Post(path_, headers, payload, "application/json");
            if (!res) {
                last_error = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status != 200) {
                last_error = "http status " + std::to_string(res->status);
                continue;
            }
            try {
                return parse_response(res->body, texts.size());
            } catch (const std::exception& e) {
                last_error = e.what();
            }
        }
        throw std::runtime_error("embedding service failed after " +
                                 std::to_string(cfg_.max_attempts) + " attempts: " + last_error);
    }

private:
    std::vector<std::vector<float>> parse_response(const std::string& body, std::size_t expected) {
        json j = json::parse(body);
        std::vector<std::vector<float>> out(expected);
        std::vector<bool> seen(expected, false);
        for (const auto& item : j.at("data")) {
            std::size_t idx = item.at("index").get<std::size_t>();
            if (idx >= expected) throw std::runtime_error("response index out of range");
            out[idx] = item.at("embedding").get<std::vector<float>>();
            seen[idx] = true;
        }
        for (std::size_t i = 0; i < expected; ++i)
            if (!seen[i]) throw std::runtime_error("response missing embedding " + std::to_string(i));
        return out;
    }

    RemoteProviderConfig cfg_;
    std::string base_;
    std::string path_;
};

} // namespace

std::unique_ptr<EmbeddingProvider> make_offline_provider() {
    return std::make_unique<OfflineProvider>();
}

std::unique_ptr<EmbeddingProvider> make_remote_provider(RemoteProviderConfig cfg) {
    return std::make_unique<RemoteProvider>(std::move(cfg));
}

std::string EmbeddingCache::key(const std::string& provider_id, const std::string& model,
                                std::string_view text) {
    std::string material = provider_id;
    material += '\x1f';
    material += model;
    material += '\x1f';
    material += text;
    return sha256_hex(material);
}

std::optional<std::vector<float>> EmbeddingCache::load(const std::string& key) const {
    fs::path vec = fs::path(dir_) / key.substr(0, 2) / (key + ".vec");
    std::ifstream in(vec, std::ios::binary);
    if (!in) return std::nullopt;
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() % 4 != 0) return std::nullopt;
    std::vector<float> out(bytes.size() / 4);
    // persisted form is little-endian float32
    std::memcpy(out.data(), bytes.data(), bytes.size());
    return out;
}

void EmbeddingCache::store(const std::string& key, std::span<const float> vec,
                           const std::string& provider_id, const std::string& model,
                           std::size_t dimension) const {
    fs::path base = fs::path(dir_) / key.substr(0, 2);
    std::string bytes(reinterpret_cast<const char*>(vec.data()), vec.size() * 4);
    write_file_atomic((base / (key + ".vec")).string(), bytes);
    json meta;
    meta["dimension"] = dimension;
    meta["provider"] = provider_id;
    meta["model"] = model;
    write_file_atomic((base / (key + ".json")).string(), meta.dump() + "\n");
}

EmbeddingSet embed_claims(std::span<const CaseRecord> cases, EmbeddingProvider& provider,
                          const std::string& cache_dir,
                          const std::function<void(const std::string&)>& warn) {
    EmbeddingCache cache(cache_dir);
    EmbeddingSet set;
    set.provider_id = provider.id();

    struct Pending {
        std::string case_id;
        std::string text;
        std::string key;
    };
    std::vector<Pending> misses;
    for (const auto& c : cases) {
        std::string text = c.claim_text;
        if (text.size() > provider.max_chars()) {
            text.resize(provider.max_chars());
            if (warn) warn("claim text for case " + c.case_id + " truncated to " +
                           std::to_string(provider.max_chars()) + " chars");
        }
        std::string key = EmbeddingCache::key(provider.id(), provider.model(), text);
        if (auto cached = cache.load(key)) {
            set.insert(Embedding{c.case_id, std::move(*cached), provider.id()});
        } else {
            misses.push_back(Pending{c.case_id, std::move(text), std::move(key)});
        }
    }

    const std::size_t batch = std::max<std::size_t>(1, std::min<std::size_t>(128, misses.size()));
    for (std::size_t start = 0; start < misses.size(); start += batch) {
        std::size_t end = std::min(misses.size(), start + batch);
        std::vector<std::string> texts;
        texts.reserve(end - start);
        for (std::size_t i = start; i < end; ++i) texts.push_back(misses[i].text);
        std::vector<std::vector<float>> vecs;
        try {
            vecs = provider.embed_batch(texts);
        } catch (const std::exception& e) {
            std::vector<std::string> failed;
            for (std::size_t i = start; i < misses.size(); ++i) failed.push_back(misses[i].case_id);
            throw EmbedFailure(std::string("embedding failed: ") + e.what() + " (" +
                                   std::to_string(failed.size()) + " cases unembedded)",
                               std::move(failed));
        }
        for (std::size_t i = start; i < end; ++i) {
            auto& vec = vecs[i - start];
            cache.store(misses[i].key, vec, provider.id(), provider.model(), vec.size());
            set.insert(Embedding{misses[i].case_id, std::move(vec), provider.id()});
        }
    }
    return set;
}

} // namespace coasim
