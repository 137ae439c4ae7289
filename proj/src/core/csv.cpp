// Copyright 2026 The Driftlock Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "driftlock/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "driftlock/errors.hpp"

namespace driftlock {

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) {
        return "nan";
    }
    return std::string(buf, ptr);
}

CsvWriter::CsvWriter(std::span<const std::string_view> header) : columns_(header.size()) {
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) text_ += ',';
        text_ += header[i];
    }
    text_ += '\n';
}

CsvWriter::CsvWriter(std::initializer_list<std::string_view> header)
    : CsvWriter(std::span<const std::string_view>(header.begin(), header.size())) {}

void CsvWriter::row(std::span<const double> values) {
    if (values.size() != columns_) {
        throw std::logic_error("CsvWriter: row width does not match header");
    }
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) text_ += ',';
        text_ += format_double(values[i]);
    }
    text_ += '\n';
}

void CsvWriter::row(std::initializer_list<double> values) {
    row(std::span<const double>(values.begin(), values.size()));
}

void CsvWriter::raw_row(std::span<const std::string> cells) {
    if (cells.size() != columns_) {
        throw std::logic_error("CsvWriter: row width does not match header");
    }
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) text_ += ',';
        text_ += cells[i];
    }
    text_ += '\n';
}

void CsvWriter::write_file(const std::filesystem::path &path) const {
    write_text_file(path, text_);
}

size_t CsvTable::column(std::string_view name) const {
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw ConfigError("missing CSV column '" + std::string(name) + "'");
}

namespace {

std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> cells;
    size_t start = 0;
    while (true) {
        size_t comma = line.find(',', start);
        std::string_view cell = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
        while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) cell.remove_suffix(1);
        cells.emplace_back(cell);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

}  // namespace

CsvTable parse_csv(std::string_view text, std::string_view source_name) {
    CsvTable table;
    size_t line_no = 0;
    size_t pos = 0;
    bool have_header = false;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        ++line_no;
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        auto cells = split_line(line);
        if (!have_header) {
            table.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw ConfigError(std::string(source_name) + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(table.header.size()) + " fields, found " +
                              std::to_string(cells.size()));
        }
        table.rows.push_back(std::move(cells));
        table.line_numbers.push_back(line_no);
    }
    if (!have_header) {
        throw ConfigError(std::string(source_name) + ": empty CSV");
    }
    return table;
}

CsvTable read_csv(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open '" + path.string() + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str(), path.string());
}

void write_text_file(const std::filesystem::path &path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

}  // namespace driftlock
