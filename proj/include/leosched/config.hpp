#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace leosched {

// Flat `key = value` config file. '#' starts a comment, keys are
// dot-separated identifiers, duplicate keys are an error.
class Config {
public:
    static Config load(const std::filesystem::path& path);

    bool has(const std::string& key) const;
    double num(const std::string& key) const;
    double num_or(const std::string& key, double fallback) const;
    std::string str(const std::string& key) const;
    std::string str_or(const std::string& key, const std::string& fallback) const;

    // Distinct middle components of keys shaped `prefix.<name>.suffix`,
    // in file order. Used for payload blocks.
    std::vector<std::string> group_names(const std::string& prefix) const;

    const std::string& file() const { return file_; }

private:
    std::string file_;
    std::map<std::string, std::string> values_;
    std::vector<std::string> order_;
};

} // namespace leosched
