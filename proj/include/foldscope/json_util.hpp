#pragma once

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"

#include "foldscope/error.hpp"

namespace foldscope {

using Json = nlohmann::ordered_json;

namespace detail {

// Rewrites bare NaN / Infinity / -Infinity tokens (as emitted by Python's json
// module) into strings so that the document parses and the loader can report
// them as non-finite values instead of a syntax error. Numeric literals that
// overflow a double (1e999) are rewritten the same way.
inline std::string quote_nonfinite_tokens(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool in_string = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            out += c;
            if (c == '\\' && i + 1 < text.size()) {
                out += text[++i];
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
            out += c;
            continue;
        }
        if (c == '-' || (c >= '0' && c <= '9')) {
            std::size_t j = i + 1;
            while (j < text.size() && std::string_view("0123456789+-.eE").find(text[j]) != std::string_view::npos) ++j;
            const std::string literal(text.substr(i, j - i));
            const double v = std::strtod(literal.c_str(), nullptr);
            if (std::isinf(v)) {
                out += v > 0 ? "\"Infinity\"" : "\"-Infinity\"";
                i = j - 1;
                continue;
            }
        }
        bool replaced = false;
        for (std::string_view tok : {"-Infinity", "Infinity", "NaN"}) {
            if (text.substr(i, tok.size()) == tok) {
                out += '"';
                out += tok;
                out += '"';
                i += tok.size() - 1;
                replaced = true;
                break;
            }
        }
        if (!replaced) out += c;
    }
    return out;
}

}  // namespace detail

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing '" + path + "'");
}

/// Canonical text form for every emitted JSON document.
inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace foldscope
