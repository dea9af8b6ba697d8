#include "leosched/config.hpp"

#include "leosched/errors.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

namespace leosched {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

Config Config::load(const std::filesystem::path& path) {
    Config cfg;
    cfg.file_ = path.string();
    std::ifstream in(path);
    if (!in) throw ParseError(cfg.file_, 0, 0, "cannot open file");

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ParseError(cfg.file_, lineno, 1, "expected 'key = value'");
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) throw ParseError(cfg.file_, lineno, 1, "empty key");
        if (cfg.values_.count(key))
            throw ParseError(cfg.file_, lineno, 1, "duplicate key '" + key + "'");
        cfg.values_[key] = value;
        cfg.order_.push_back(key);
    }
    return cfg;
}

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

double Config::num(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
        throw ValidationError(file_ + ": missing required key '" + key + "'");
    const char* begin = it->second.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + it->second.size())
        throw ValidationError(file_ + ": key '" + key + "' is not a number: '" + it->second + "'");
    return v;
}

double Config::num_or(const std::string& key, double fallback) const {
    return has(key) ? num(key) : fallback;
}

std::string Config::str(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
        throw ValidationError(file_ + ": missing required key '" + key + "'");
    return it->second;
}

std::string Config::str_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? str(key) : fallback;
}

std::vector<std::string> Config::group_names(const std::string& prefix) const {
    std::vector<std::string> names;
    const std::string p = prefix + ".";
    for (const std::string& key : order_) {
        if (key.rfind(p, 0) != 0) continue;
        std::size_t dot = key.find('.', p.size());
        if (dot == std::string::npos) continue;
        std::string name = key.substr(p.size(), dot - p.size());
        if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
    }
    return names;
}

} // namespace leosched
