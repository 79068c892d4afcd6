#include "coasim/citation.hpp"

#include "coasim/util.hpp"

#include <cctype>

namespace coasim {

namespace {

constexpr std::string_view kDi = "第";   // 第
constexpr std::string_view kTiao = "條"; // 條
constexpr std::string_view kZhi = "之";  // 之

// Full-width digits/hyphen/space to ASCII.
std::string normalize_width(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    for (std::size_t i = 0; i < in.size();) {
        unsigned char c = in[i];
        if (c == 0xEF && i + 2 < in.size()) {
            unsigned char c1 = in[i + 1], c2 = in[i + 2];
            if (c1 == 0xBC && c2 >= 0x90 && c2 <= 0x99) { // U+FF10..FF19
                out.push_back(static_cast<char>('0' + (c2 - 0x90)));
                i += 3;
                continue;
            }
            if (c1 == 0xBC && c2 == 0x8D) { // U+FF0D fullwidth hyphen
                out.push_back('-');
                i += 3;
                continue;
            }
        }
        if (c == 0xE3 && i + 2 < in.size() && (unsigned char)in[i + 1] == 0x80 &&
            (unsigned char)in[i + 2] == 0x80) { // U+3000 ideographic space
            out.push_back(' ');
            i += 3;
            continue;
        }
        out.push_back(in[i]);
        ++i;
    }
    return out;
}

bool take_int(std::string_view& s, int& out) {
    std::size_t i = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == 0) return false;
    out = 0;
    for (std::size_t j = 0; j < i; ++j) out = out * 10 + (s[j] - '0');
    s.remove_prefix(i);
    return true;
}

bool take(std::string_view& s, std::string_view token) {
    if (s.substr(0, token.size()) != token) return false;
    s.remove_prefix(token.size());
    return true;
}

// Decodes the codepoint ending at byte offset `end` (exclusive); returns its
// start offset, or `end` if the tail is not valid UTF-8.
std::size_t prev_char(std::string_view s, std::size_t end, char32_t& cp) {
    std::size_t i = end;
    while (i > 0 && (static_cast<unsigned char>(s[i - 1]) & 0xC0) == 0x80) --i;
    if (i == 0 && (static_cast<unsigned char>(s[0]) & 0xC0) == 0x80) return end;
    std::size_t start = i > 0 ? i - 1 : 0;
    unsigned char lead = s[start];
    std::size_t len = end - start;
    if (lead < 0x80 && len == 1) {
        cp = lead;
        return start;
    }
    if ((lead >> 5) == 0x6 && len == 2) {
        cp = ((lead & 0x1F) << 6) | (s[start + 1] & 0x3F);
        return start;
    }
    if ((lead >> 4) == 0xE && len == 3) {
        cp = ((lead & 0x0F) << 12) | ((s[start + 1] & 0x3F) << 6) | (s[start + 2] & 0x3F);
        return start;
    }
    if ((lead >> 3) == 0x1E && len == 4) {
        cp = ((lead & 0x07) << 18) | ((s[start + 1] & 0x3F) << 12) | ((s[start + 2] & 0x3F) << 6) |
             (s[start + 3] & 0x3F);
        return start;
    }
    return end;
}

bool is_act_char(char32_t cp) {
    // CJK unified ideographs, minus the citation markers themselves.
    if (cp == 0x7b2c || cp == 0x689d || cp == 0x4e4b) return false;
    return cp >= 0x4E00 && cp <= 0x9FFF;
}

// Connectives that often directly precede an act name in running text
// (依民法第… / 並參照銀行法第…). Stripped from the front of a scanned run.
bool is_leading_stopword(char32_t cp) {
    switch (cp) {
        case 0x4F9D: // 依
        case 0x6309: // 按
        case 0x7167: // 照
        case 0x64DA: // 據
        case 0x53C3: // 參
        case 0x66A8: // 暨
        case 0x53CA: // 及
        case 0x8207: // 與
        case 0x6216: // 或
        case 0x548C: // 和
        case 0x4E26: // 並
        case 0x67E5: // 查
        case 0x898B: // 見
        case 0x540C: // 同
            return true;
        default:
            return false;
    }
}

// Drops leading connective characters from an act-name candidate.
std::string strip_leading_stopwords(std::string_view run) {
    std::size_t pos = 0;
    while (pos < run.size()) {
        unsigned char lead = run[pos];
        std::size_t len = lead < 0x80 ? 1 : (lead >> 5) == 0x6 ? 2 : (lead >> 4) == 0xE ? 3 : 4;
        if (pos + len > run.size()) break;
        char32_t cp = 0;
        std::size_t start = prev_char(run, pos + len, cp);
        if (start != pos || !is_leading_stopword(cp)) break;
        pos += len;
    }
    return std::string(run.substr(pos));
}

// Parses the part after 第: n, n-k, or n條之k endings handled by caller flags.
std::optional<ArticleRef> finish(std::string act, std::string_view rest, bool needs_tiao,
                                 const AliasTable& aliases) {
    int article = 0;
    std::optional<int> sub;
    if (!take_int(rest, article) || article <= 0) return std::nullopt;
    if (take(rest, "-")) {
        int k = 0;
        if (!take_int(rest, k) || k < 0) return std::nullopt;
        sub = k;
        if (needs_tiao && !take(rest, kTiao)) return std::nullopt;
    } else if (needs_tiao) {
        if (!take(rest, kTiao)) return std::nullopt;
        if (take(rest, kZhi)) {
            int k = 0;
            if (!take_int(rest, k) || k < 0) return std::nullopt;
            sub = k;
        }
    }
    if (!trim(rest).empty()) return std::nullopt;
    return ArticleRef{resolve_act(act, aliases), article, sub};
}

} // namespace

std::string format_citation(const ArticleRef& ref) {
    std::string out = ref.act;
    out += kDi;
    out += std::to_string(ref.article);
    if (ref.sub) {
        out += '-';
        out += std::to_string(*ref.sub);
    }
    out += kTiao;
    return out;
}

std::optional<ArticleRef> parse_citation(std::string_view text, const AliasTable& aliases) {
    std::string norm = normalize_width(text);
    std::string_view s = trim(norm);
    if (s.empty()) return std::nullopt;

    auto di = s.find(kDi);
    if (di != std::string_view::npos) {
        std::string act(trim(s.substr(0, di)));
        if (act.empty()) return std::nullopt;
        return finish(std::move(act), s.substr(di + kDi.size()), /*needs_tiao=*/true, aliases);
    }

    // bare form: 〈act〉〈n〉 or 〈act〉〈n〉-〈k〉
    std::size_t d = 0;
    while (d < s.size() && !std::isdigit(static_cast<unsigned char>(s[d]))) ++d;
    if (d == 0 || d == s.size()) return std::nullopt;
    std::string act(trim(s.substr(0, d)));
    if (act.empty() || act.find(kTiao) != std::string::npos) return std::nullopt;
    return finish(std::move(act), s.substr(d), /*needs_tiao=*/false, aliases);
}

std::vector<ArticleRef> extract_citations(std::string_view body, const AliasTable& aliases) {
    std::string norm = normalize_width(body);
    std::string_view s = norm;
    std::vector<ArticleRef> out;
    std::size_t pos = 0;
    while ((pos = s.find(kDi, pos)) != std::string_view::npos) {
        // act name = maximal run of CJK chars immediately before 第
        std::size_t start = pos;
        while (start > 0) {
            char32_t cp = 0;
            std::size_t prev = prev_char(s, start, cp);
            if (prev == start || !is_act_char(cp)) break;
            start = prev;
        }
        std::string act = strip_leading_stopwords(s.substr(start, pos - start));
        if (!act.empty()) {
            std::string_view rest = s.substr(pos + kDi.size());
            int article = 0;
            std::optional<int> sub;
            if (take_int(rest, article) && article > 0) {
                bool ok = false;
                if (take(rest, "-")) {
                    int k = 0;
                    if (take_int(rest, k) && take(rest, kTiao)) {
                        sub = k;
                        ok = true;
                    }
                } else if (take(rest, kTiao)) {
                    ok = true;
                    if (take(rest, kZhi)) {
                        int k = 0;
                        if (take_int(rest, k)) sub = k;
                    }
                }
                if (ok) out.push_back(ArticleRef{resolve_act(act, aliases), article, sub});
            }
        }
        pos += kDi.size();
    }
    return out;
}

} // namespace coasim
