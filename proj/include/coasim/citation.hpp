#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace coasim {

// One normalized statute citation: act name, article number, optional
// sub-article (the "-3" in 刑法185-3).
struct ArticleRef {
    std::string act;
    int article = 0;
    std::optional<int> sub;

    auto operator<=>(const ArticleRef&) const = default;
};

// Canonical text form: 〈act〉第〈n〉條 or 〈act〉第〈n〉-〈k〉條.
std::string format_citation(const ArticleRef& ref);

// Optional act-name alias resolution (abbreviation -> canonical name).
using AliasTable = std::map<std::string, std::string>;

inline std::string resolve_act(const std::string& act, const AliasTable& aliases) {
    auto it = aliases.find(act);
    return it == aliases.end() ? act : it->second;
}

// Parses a single citation. Accepted forms:
//   〈act〉第〈n〉條, 〈act〉第〈n〉-〈k〉條, 〈act〉第〈n〉條之〈k〉, 〈act〉〈n〉-〈k〉, 〈act〉〈n〉
// Full-width digits and hyphens are normalized to ASCII. Non-matching
// input yields nullopt, never an error.
std::optional<ArticleRef> parse_citation(std::string_view text, const AliasTable& aliases = {});

// Scans free judgment text for 〈act〉第〈n〉條-style citations.
// Only the explicit 第…條 form is recognized in running text.
std::vector<ArticleRef> extract_citations(std::string_view body, const AliasTable& aliases = {});

} // namespace coasim
