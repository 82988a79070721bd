/*
   Copyright 2026 The lagprod Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lagprod/batch_io.hpp"
#include "lagprod/harness.hpp"

namespace lagprod {

/// Keys accepted in a config file: the long flag names without "--".
inline constexpr std::string_view kConfigKeys[] = {"seed", "out",  "workers", "n",    "p",
                                                   "q",    "beta", "reps",    "mesh", "cutoff",
                                                   "tol",  "threshold", "xmax"};

inline bool is_config_key(std::string_view key) {
    return std::find(std::begin(kConfigKeys), std::end(kConfigKeys), key) != std::end(kConfigKeys);
}

namespace detail {

inline std::string trim(std::string_view s) {
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

}  // namespace detail

/// Parses line-oriented `key = value` text. Blank lines and lines starting
/// with '#' are skipped. Unknown or repeated keys are errors.
inline std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text,
                                                                     const std::string& source = "<config>") {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError(source, lineno, "expected 'key = value'");
        std::string key = detail::trim(std::string_view(t).substr(0, eq));
        std::string value = detail::trim(std::string_view(t).substr(eq + 1));
        if (key.empty()) throw ParseError(source, lineno, "empty key");
        if (!is_config_key(key)) throw ParseError(source, lineno, "unknown key '" + key + "'");
        if (value.empty()) throw ParseError(source, lineno, "empty value for '" + key + "'");
        for (const auto& kv : out) {
            if (kv.first == key) throw ParseError(source, lineno, "duplicate key '" + key + "'");
        }
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

inline std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path) {
    return parse_config(read_text_file(path), path.string());
}

}  // namespace lagprod
