/*
 * Copyright 2026 The apeval Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "apeval/errors.hpp"

namespace apeval {

/// Shortest round-trip decimal form; keeps CSV output byte-stable.
inline std::string format_double(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

inline std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') quoted += "\"\"";
        else quoted.push_back(c);
    }
    quoted.push_back('"');
    return quoted;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path) : out_(path) {
        if (!out_) throw Error("cannot write " + path.string());
    }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i > 0) out_ << ',';
            out_ << csv_quote(fields[i]);
        }
        out_ << '\n';
        ++rows_;
    }

    /// Data rows written so far (header excluded when written first).
    std::size_t rows() const { return rows_ == 0 ? 0 : rows_ - 1; }

private:
    std::ofstream out_;
    std::size_t rows_ = 0;
};

/// Minimal reader for the files this project writes (quotes, no embedded
/// newlines inside unquoted fields).
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

inline std::string opt_field(const std::optional<double>& value) {
    return value ? format_double(*value) : std::string{};
}

}  // namespace apeval
