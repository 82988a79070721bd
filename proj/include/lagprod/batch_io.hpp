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

// SampleBatch CSV:
//
//   # label=<label>
//   # <key>=<value>        one line per metadata entry, in order
//   replicate,value
//   <r>,<value>            ascending replicate, %.17g
//
// Missing replicates have no row; the writer of the batch records them in
// the metadata.

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <zlib.h>

#include "lagprod/stats.hpp"

namespace lagprod {

/// Malformed input file; carries the file name and 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), file_(file), line_(line) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

inline constexpr const char* kBatchColumnHeader = "replicate,value";

inline std::string batch_to_csv(const SampleBatch& batch) {
    std::string out;
    out += "# label=" + batch.label + "\n";
    for (const auto& [k, v] : batch.params.entries()) out += "# " + k + "=" + v + "\n";
    out += kBatchColumnHeader;
    out += "\n";
    for (const auto& s : batch.samples) {
        out += std::to_string(s.replicate);
        out += ',';
        out += format_double(s.value);
        out += '\n';
    }
    return out;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!os) throw std::runtime_error("write failed for " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

inline void write_batch_csv(const std::filesystem::path& path, const SampleBatch& batch) {
    write_text_file(path, batch_to_csv(batch));
}

inline SampleBatch parse_batch_csv(const std::string& text, const std::string& source = "<memory>") {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    std::string label;
    bool have_label = false;
    Metadata meta;
    bool in_rows = false;
    std::vector<Sample> samples;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!in_rows) {
            if (line.rfind("# ", 0) == 0) {
                const auto eq = line.find('=');
                if (eq == std::string::npos || eq == 2) throw ParseError(source, lineno, "metadata line needs key=value");
                std::string key = line.substr(2, eq - 2);
                std::string value = line.substr(eq + 1);
                if (key == "label" && !have_label) {
                    label = std::move(value);
                    have_label = true;
                } else {
                    meta.set(key, std::move(value));
                }
                continue;
            }
            if (line != kBatchColumnHeader) {
                throw ParseError(source, lineno, "expected column header '" + std::string(kBatchColumnHeader) + "'");
            }
            in_rows = true;
            continue;
        }
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(source, lineno, "row needs 'replicate,value'");
        const std::string rep = line.substr(0, comma);
        const std::string val = line.substr(comma + 1);
        char* end = nullptr;
        errno = 0;
        const unsigned long long r = std::strtoull(rep.c_str(), &end, 10);
        if (rep.empty() || *end != '\0' || errno != 0 || rep[0] == '-') {
            throw ParseError(source, lineno, "bad replicate index '" + rep + "'");
        }
        errno = 0;
        const double v = std::strtod(val.c_str(), &end);
        // Underflow to a subnormal is fine; overflow is not.
        if (val.empty() || *end != '\0' || (errno == ERANGE && std::isinf(v))) {
            throw ParseError(source, lineno, "bad value '" + val + "'");
        }
        if (!samples.empty() && r <= samples.back().replicate) {
            throw ParseError(source, lineno, "replicate indices must be strictly increasing");
        }
        samples.push_back({static_cast<std::uint64_t>(r), v});
    }
    if (!in_rows) throw ParseError(source, lineno, "missing column header");
    if (samples.empty()) throw ParseError(source, lineno, "batch has no rows");
    return SampleBatch::make(std::move(label), std::move(meta), std::move(samples));
}

inline SampleBatch read_batch_csv(const std::filesystem::path& path) {
    return parse_batch_csv(read_text_file(path), path.string());
}

/// zlib CRC-32 of a file's bytes, as 8 lowercase hex digits.
inline std::string file_crc32(const std::filesystem::path& path) {
    const std::string bytes = read_text_file(path);
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08lx", static_cast<unsigned long>(crc));
    return buf;
}

}  // namespace lagprod
