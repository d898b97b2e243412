// CSV emission with shortest round-trip numeric formatting, so files are
// portable and byte-stable across runs.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ermakov {

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

class CsvWriter {
  public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}

    void header(const std::vector<std::string>& names);
    void row(const std::vector<double>& values); // count must match the header

  private:
    std::ostream& os_;
    std::size_t columns_ = 0;
};

} // namespace ermakov
