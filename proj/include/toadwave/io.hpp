#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace toadwave {

/// Shortest decimal representation that round-trips to the same double, so
/// output files are byte-stable across runs.
std::string format_double(double v);

void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Minimal CSV assembly: header once, then rows of shortest-round-trip
/// numbers. UTF-8, LF line endings.
class CsvBuilder {
public:
    explicit CsvBuilder(std::span<const std::string> columns);
    void add_row(std::span<const double> values);
    const std::string& str() const { return buf_; }

private:
    std::size_t n_cols_;
    std::string buf_;
};

} // namespace toadwave
