#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hdcast {

using Series = std::vector<double>;

/// Base for errors raised by bad input data or failed model fits.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data violates a documented invariant (malformed CSV, corrupt counts, ...).
class DataError : public Error {
public:
    using Error::Error;
};

/// A model could not be fitted or evaluated.
class ModelError : public Error {
public:
    using Error::Error;
};

/// Malformed row in a CSV input. `row` is the 1-based line number in the file.
class ParseError : public DataError {
public:
    ParseError(std::size_t row, std::string field, const std::string &what);
    std::size_t row() const noexcept { return row_; }
    const std::string &field() const noexcept { return field_; }

private:
    std::size_t row_;
    std::string field_;
};

// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);
// printf-style %.<digits>g.
std::string format_significant(double value, int digits);

std::vector<std::string_view> split_csv_line(std::string_view line);
std::string_view trim_line_ending(std::string_view line);

/// Writes `contents` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path &path, std::string_view contents);
std::string read_file(const std::filesystem::path &path);

} // namespace hdcast
