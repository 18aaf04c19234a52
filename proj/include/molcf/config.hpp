#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace molcf {

// Key/value configuration with [section] headers. Keys are addressed as
// "section.key"; CLI flags override file values through set().
class Config {
public:
    static Config parse_text(const std::string& text);
    static Config parse_file(const std::string& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_str(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    // Canonical "key = value" lines, sorted by key; input to the config hash.
    std::string resolved_text() const;
    std::string hash() const;   // FNV-1a 64 of resolved_text, hex

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace molcf
