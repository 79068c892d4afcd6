#include "coasim/util.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

namespace coasim {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::string& path, std::string_view content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write file: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

static std::string digest_hex(const unsigned char* md, unsigned len) {
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned len = 0;
    if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr))
        throw std::runtime_error("sha256 failed");
    return digest_hex(md, len);
}

std::string sha256_file_hex(const std::string& path) {
    return sha256_hex(read_file(path));
}

std::string csv_escape(std::string_view field) {
    bool needs = field.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::vector<std::string> csv_split_record(std::string_view line, char sep) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == sep) {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c == '\r') {
            // ignore
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

IniConfig IniConfig::parse(std::string_view text) {
    IniConfig cfg;
    std::string section;
    std::size_t lineno = 0;
    for (const auto& raw : split(text, '\n')) {
        ++lineno;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error("config line " + std::to_string(lineno) + ": malformed section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            cfg.sections_[section];
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (key.empty())
            throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
        cfg.sections_[section].emplace_back(std::move(key), std::move(value));
    }
    return cfg;
}

IniConfig IniConfig::parse_file(const std::string& path) {
    return parse(read_file(path));
}

std::optional<std::string> IniConfig::get(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    if (it == sections_.end()) return std::nullopt;
    for (auto rit = it->second.rbegin(); rit != it->second.rend(); ++rit)
        if (rit->first == key) return rit->second;
    return std::nullopt;
}

std::string IniConfig::get_or(const std::string& section, const std::string& key, std::string def) const {
    auto v = get(section, key);
    return v ? *v : std::move(def);
}

std::vector<std::string> IniConfig::get_all(const std::string& section, const std::string& key) const {
    std::vector<std::string> out;
    auto it = sections_.find(section);
    if (it == sections_.end()) return out;
    for (const auto& [k, v] : it->second)
        if (k == key) out.push_back(v);
    return out;
}

const std::vector<std::pair<std::string, std::string>>& IniConfig::pairs(
    const std::string& section) const {
    static const std::vector<std::pair<std::string, std::string>> empty;
    auto it = sections_.find(section);
    return it == sections_.end() ? empty : it->second;
}

bool IniConfig::has_section(const std::string& section) const {
    return sections_.count(section) != 0;
}

void IniConfig::set(const std::string& section, const std::string& key, std::string value) {
    sections_[section].emplace_back(key, std::move(value));
}

} // namespace coasim
