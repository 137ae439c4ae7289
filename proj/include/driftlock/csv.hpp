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

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace driftlock {

// Shortest round-trip decimal form; identical doubles always render identically.
std::string format_double(double value);

// Accumulates CSV text in memory; write_file() emits it in one shot.
class CsvWriter {
public:
    explicit CsvWriter(std::span<const std::string_view> header);
    CsvWriter(std::initializer_list<std::string_view> header);

    void row(std::span<const double> values);
    void row(std::initializer_list<double> values);
    // Mixed row of pre-rendered cells.
    void raw_row(std::span<const std::string> cells);

    const std::string &text() const { return text_; }
    void write_file(const std::filesystem::path &path) const;

private:
    std::string text_;
    size_t columns_ = 0;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<size_t> line_numbers;  // 1-based source line of each row

    // Index of `name` in the header; throws ConfigError naming the missing column.
    size_t column(std::string_view name) const;
};

// Minimal reader for the project's own CSV schemas: comma separated, no quoting.
CsvTable read_csv(const std::filesystem::path &path);
CsvTable parse_csv(std::string_view text, std::string_view source_name);

void write_text_file(const std::filesystem::path &path, std::string_view text);

}  // namespace driftlock
