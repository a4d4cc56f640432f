#include "hdcast/common.hpp"
#include "hdcast/parallel.hpp"

#include <array>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace hdcast {

ParseError::ParseError(std::size_t row, std::string field, const std::string &what)
    : DataError("row " + std::to_string(row) + ", field '" + field + "': " + what),
      row_(row), field_(std::move(field)) {}

std::string format_double(double value) {
    if (value == 0.0) return "0";
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf.data(), end);
}

std::string format_significant(double value, int digits) {
    std::array<char, 64> buf{};
    const int len = std::snprintf(buf.data(), buf.size(), "%.*g", digits, value);
    return std::string(buf.data(), static_cast<std::size_t>(len));
}

std::string_view trim_line_ending(std::string_view line) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
    return line;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

void write_file_atomic(const std::filesystem::path &path, std::string_view contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open " + tmp.string() + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw DataError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw DataError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {
std::atomic<std::size_t> g_max_threads{0};
}

void set_max_threads(std::size_t threads) { g_max_threads = threads; }

std::size_t max_threads() {
    const std::size_t cap = g_max_threads.load();
    if (cap > 0) return cap;
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

} // namespace hdcast
