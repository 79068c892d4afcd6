#include "coasim/corpus.hpp"

#include "coasim/util.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <unordered_set>

#include <json.hpp>

namespace coasim {

using nlohmann::json;

void Corpus::add(CaseRecord rec) {
    coa_index[rec.coa].push_back(cases.size());
    cases.push_back(std::move(rec));
}

namespace {

[[noreturn]] void load_fail(std::size_t lineno, const std::string& what) {
    throw LoadError("line " + std::to_string(lineno) + ": " + what);
}

void add_checked(Corpus& corpus, std::unordered_set<std::string>& seen, CaseRecord rec,
                 std::size_t lineno) {
    if (rec.case_id.empty()) load_fail(lineno, "empty case_id");
    if (rec.coa.empty()) load_fail(lineno, "missing coa");
    if (!seen.insert(rec.case_id).second) load_fail(lineno, "duplicate case_id '" + rec.case_id + "'");
    corpus.add(std::move(rec));
}

std::set<ArticleRef> citations_from_json(const json& j, std::size_t lineno, const AliasTable& aliases) {
    std::set<ArticleRef> out;
    if (!j.is_array()) load_fail(lineno, "citations must be an array");
    for (const auto& item : j) {
        if (item.is_string()) {
            if (auto ref = parse_citation(item.get<std::string>(), aliases)) out.insert(*ref);
        } else if (item.is_object()) {
            ArticleRef ref;
            if (!item.contains("act") || !item.contains("article"))
                load_fail(lineno, "structured citation needs act and article");
            ref.act = resolve_act(item.at("act").get<std::string>(), aliases);
            ref.article = item.at("article").get<int>();
            if (item.contains("sub") && !item.at("sub").is_null()) ref.sub = item.at("sub").get<int>();
            if (ref.act.empty() || ref.article <= 0) load_fail(lineno, "invalid citation fields");
            out.insert(ref);
        } else {
            load_fail(lineno, "citation entries must be strings or objects");
        }
    }
    return out;
}

Corpus load_jsonl(const std::string& text, const AliasTable& aliases) {
    Corpus corpus;
    std::unordered_set<std::string> seen;
    std::size_t lineno = 0;
    for (const auto& raw : split(text, '\n')) {
        ++lineno;
        std::string_view line = trim(raw);
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            load_fail(lineno, std::string("bad JSON: ") + e.what());
        }
        if (!j.is_object()) load_fail(lineno, "record must be a JSON object");
        if (!j.contains("case_id") || !j.at("case_id").is_string()) load_fail(lineno, "missing case_id");
        if (!j.contains("coa") || !j.at("coa").is_string()) load_fail(lineno, "missing coa");
        CaseRecord rec;
        rec.case_id = j.at("case_id").get<std::string>();
        rec.coa = j.at("coa").get<std::string>();
        if (j.contains("claim_text") && j.at("claim_text").is_string())
            rec.claim_text = j.at("claim_text").get<std::string>();
        if (j.contains("citations")) {
            rec.citations = citations_from_json(j.at("citations"), lineno, aliases);
        } else if (j.contains("body_text") && j.at("body_text").is_string()) {
            for (auto& ref : extract_citations(j.at("body_text").get<std::string>(), aliases))
                rec.citations.insert(std::move(ref));
        }
        add_checked(corpus, seen, std::move(rec), lineno);
    }
    return corpus;
}

Corpus load_csv(const std::string& text, const AliasTable& aliases) {
    Corpus corpus;
    std::unordered_set<std::string> seen;
    std::size_t lineno = 0;
    bool header_seen = false;
    for (const auto& raw : split(text, '\n')) {
        ++lineno;
        if (trim(raw).empty()) continue;
        auto fields = csv_split_record(raw);
        if (!header_seen) {
            if (fields.size() < 4 || fields[0] != "case_id" || fields[1] != "coa" ||
                fields[2] != "claim_text" || fields[3] != "citations")
                load_fail(lineno, "expected header case_id,coa,claim_text,citations");
            header_seen = true;
            continue;
        }
        if (fields.size() != 4) load_fail(lineno, "expected 4 fields");
        CaseRecord rec;
        rec.case_id = fields[0];
        rec.coa = fields[1];
        rec.claim_text = fields[2];
        for (const auto& part : split(fields[3], ';')) {
            if (trim(part).empty()) continue;
            if (auto ref = parse_citation(part, aliases)) rec.citations.insert(*ref);
        }
        add_checked(corpus, seen, std::move(rec), lineno);
    }
    return corpus;
}

} // namespace

Corpus load_corpus(const std::string& path, CorpusFormat format, const AliasTable& aliases) {
    std::string text = read_file(path);
    return format == CorpusFormat::jsonl ? load_jsonl(text, aliases) : load_csv(text, aliases);
}

Corpus apply_exclusions(const Corpus& corpus, const ExclusionList& excl) {
    Corpus out;
    for (const auto& c : corpus.cases) {
        CaseRecord rec = c;
        if (!excl.acts.empty()) {
            for (auto it = rec.citations.begin(); it != rec.citations.end();) {
                if (excl.acts.count(it->act))
                    it = rec.citations.erase(it);
                else
                    ++it;
            }
        }
        out.add(std::move(rec));
    }
    return out;
}

Corpus sample_cases(const Corpus& corpus, std::size_t m, std::size_t n, std::uint64_t seed) {
    // Eligible COAs: at least n cases. Order by case count descending, then
    // label ascending; take the first m.
    std::vector<std::pair<std::string, std::vector<std::size_t>>> eligible;
    for (const auto& [label, idxs] : corpus.coa_index)
        if (idxs.size() >= n) eligible.emplace_back(label, idxs);
    if (eligible.size() < m)
        throw std::runtime_error("need " + std::to_string(m) + " COAs with >= " + std::to_string(n) +
                                 " cases, found " + std::to_string(eligible.size()));
    std::stable_sort(eligible.begin(), eligible.end(), [](const auto& a, const auto& b) {
        if (a.second.size() != b.second.size()) return a.second.size() > b.second.size();
        return a.first < b.first;
    });
    eligible.resize(m);
    std::sort(eligible.begin(), eligible.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    Corpus out;
    for (const auto& [label, idxs] : eligible) {
        // Sort case ids so the draw depends only on the id set, not file order.
        std::vector<std::size_t> order = idxs;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return corpus.cases[a].case_id < corpus.cases[b].case_id;
        });
        std::mt19937_64 rng(seed ^ fnv1a64(label));
        // partial Fisher-Yates: first n slots become the sample
        // (modulo draw keeps the stream platform-stable)
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t j = i + static_cast<std::size_t>(rng() % (order.size() - i));
            std::swap(order[i], order[j]);
        }
        order.resize(n);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return corpus.cases[a].case_id < corpus.cases[b].case_id;
        });
        for (std::size_t idx : order) out.add(corpus.cases[idx]);
    }
    return out;
}

std::string corpus_to_jsonl(const Corpus& corpus) {
    std::string out;
    for (const auto& c : corpus.cases) {
        json j;
        j["case_id"] = c.case_id;
        j["coa"] = c.coa;
        j["claim_text"] = c.claim_text;
        json cits = json::array();
        for (const auto& ref : c.citations) {
            json o;
            o["act"] = ref.act;
            o["article"] = ref.article;
            if (ref.sub) o["sub"] = *ref.sub;
            cits.push_back(std::move(o));
        }
        j["citations"] = std::move(cits);
        out += j.dump();
        out += '\n';
    }
    return out;
}

} // namespace coasim
