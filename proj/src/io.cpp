#include "toadwave/io.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace toadwave {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

CsvBuilder::CsvBuilder(std::span<const std::string> columns) : n_cols_(columns.size()) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) buf_ += ',';
        buf_ += columns[i];
    }
    buf_ += '\n';
}

void CsvBuilder::add_row(std::span<const double> values) {
    if (values.size() != n_cols_)
        throw std::invalid_argument("csv row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) buf_ += ',';
        buf_ += format_double(values[i]);
    }
    buf_ += '\n';
}

} // namespace toadwave
