#include "ermakov/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "ermakov/errors.hpp"

namespace ermakov {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path);
}

ConfigFile ConfigFile::parse_text(const std::string& text, const std::string& origin) {
    ConfigFile cfg;
    cfg.origin_ = origin;

    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError(origin + ":" + std::to_string(lineno) +
                                 ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ParseError(origin + ":" + std::to_string(lineno) + ": empty section name");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(origin + ":" + std::to_string(lineno) +
                             ": expected 'key = value' or '[section]'");
        if (section.empty())
            throw ParseError(origin + ":" + std::to_string(lineno) +
                             ": entry before any [section] header");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ParseError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (value.empty())
            throw ParseError(origin + ":" + std::to_string(lineno) + ": empty value for key '" +
                             key + "'");
        auto [it, inserted] = cfg.sections_[section].emplace(key, Entry{value, lineno, false});
        if (!inserted)
            throw ParseError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                             "' in section [" + section + "] (first at line " +
                             std::to_string(it->second.line) + ")");
        cfg.order_.push_back(section + "." + key);
    }
    return cfg;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return false;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return false;
    k->second.used = true;
    return true;
}

std::string ConfigFile::get(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s != sections_.end()) {
        const auto k = s->second.find(key);
        if (k != s->second.end()) {
            k->second.used = true;
            return k->second.value;
        }
    }
    throw ParseError(origin_ + ": missing required key '" + key + "' in section [" + section +
                     "]");
}

std::string ConfigFile::get_or(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

double ConfigFile::parse_number(const std::string& section, const std::string& key,
                                const std::string& text) const {
    const std::string v = trim(text);
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ParseError(origin_ + ": key '" + key + "' in section [" + section +
                         "]: '" + v + "' is not a number");
    }
}

double ConfigFile::number(const std::string& section, const std::string& key) const {
    return parse_number(section, key, get(section, key));
}

double ConfigFile::number_or(const std::string& section, const std::string& key,
                             double fallback) const {
    if (!has(section, key)) return fallback;
    return number(section, key);
}

std::vector<double> ConfigFile::number_list(const std::string& section,
                                            const std::string& key) const {
    const std::string raw = get(section, key);
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= raw.size()) {
        const auto comma = raw.find(',', start);
        const std::string piece =
            raw.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!trim(piece).empty()) out.push_back(parse_number(section, key, piece));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty())
        throw ParseError(origin_ + ": key '" + key + "' in section [" + section +
                         "] holds no numbers");
    return out;
}

std::vector<std::string> ConfigFile::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& name : order_) {
        const auto dot = name.find('.');
        const auto& entry = sections_.at(name.substr(0, dot)).at(name.substr(dot + 1));
        if (!entry.used) out.push_back(name);
    }
    return out;
}

} // namespace ermakov
