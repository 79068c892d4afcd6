#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace coasim {

// Stable 64-bit FNV-1a. Used wherever a platform-independent hash is needed
// (per-COA sampling streams, offline embedding buckets).
inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 0xcbf29ce484222325ull) {
    std::uint64_t h = seed;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\n'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

// Shortest round-trip decimal form; stable across runs and platforms.
inline std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf, p);
}

std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, std::string_view content);
std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::string& path);

// --- minimal CSV ---

std::string csv_escape(std::string_view field);
// Parses one CSV record; handles quoted fields with embedded separators/quotes.
std::vector<std::string> csv_split_record(std::string_view line, char sep = ',');

// --- config file (INI-style sections, key = value) ---

class IniConfig {
public:
    static IniConfig parse(std::string_view text);
    static IniConfig parse_file(const std::string& path);

    std::optional<std::string> get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key, std::string def) const;
    // All values for a repeated key, in file order.
    std::vector<std::string> get_all(const std::string& section, const std::string& key) const;
    bool has_section(const std::string& section) const;
    // All (key, value) pairs of a section, in file order.
    const std::vector<std::pair<std::string, std::string>>& pairs(const std::string& section) const;

    void set(const std::string& section, const std::string& key, std::string value);

private:
    // section -> ordered (key, value) pairs
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections_;
};

} // namespace coasim
