#include "ermakov/csv.hpp"

#include <charconv>

#include "ermakov/errors.hpp"

namespace ermakov {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void CsvWriter::header(const std::vector<std::string>& names) {
    if (names.empty()) throw Error("csv: header needs at least one column");
    columns_ = names.size();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) os_ << ',';
        os_ << names[i];
    }
    os_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    if (columns_ == 0) throw Error("csv: row before header");
    if (values.size() != columns_)
        throw Error("csv: row has " + std::to_string(values.size()) + " values, header has " +
                    std::to_string(columns_));
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) os_ << ',';
        os_ << format_double(values[i]);
    }
    os_ << '\n';
}

} // namespace ermakov
