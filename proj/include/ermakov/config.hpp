// Line-oriented scenario config: "[section]" headers over "key = value"
// entries, '#' comments, blank lines ignored.  Keys are tracked on access so
// a scenario loader can reject typos (unused keys) after it has consumed
// everything it understands.
#pragma once

#include <map>
#include <string>
#include <vector>

namespace ermakov {

class ConfigFile {
  public:
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_text(const std::string& text, const std::string& origin);

    bool has(const std::string& section, const std::string& key) const;

    // Raw string value; ParseError when absent.
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;

    double number(const std::string& section, const std::string& key) const;
    double number_or(const std::string& section, const std::string& key, double fallback) const;

    // Comma-separated list of numbers.
    std::vector<double> number_list(const std::string& section, const std::string& key) const;

    // Keys never read through any accessor, as "section.key" strings.
    std::vector<std::string> unused_keys() const;

  private:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool used = false;
    };

    double parse_number(const std::string& section, const std::string& key,
                        const std::string& text) const;

    std::string origin_;
    std::map<std::string, std::map<std::string, Entry>> sections_;
    std::vector<std::string> order_; // "section.key" in file order
};

} // namespace ermakov
