#pragma once

// JSON/CSV emission. All floating-point output is serialized with 12
// significant digits, which nlohmann's dump() does not let us control, so a
// small recursive writer is used for output documents.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "rcoase/distribution.hpp"

namespace rcoase {

namespace detail {

inline void write_json_string(std::ostream& os, const std::string& s) {
    os << '"';
    for (char c : s) {
        switch (c) {
            case '"': os << "\\\""; break;
            case '\\': os << "\\\\"; break;
            case '\n': os << "\\n"; break;
            case '\t': os << "\\t"; break;
            case '\r': os << "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    os << buf;
                } else {
                    os << c;
                }
        }
    }
    os << '"';
}

}  // namespace detail

inline std::string format_double(double v) {
    if (std::isnan(v)) return "null";
    if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline void write_json(std::ostream& os, const json& j, int indent = 0) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string pad1(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ",\n";
                first = false;
                os << pad1;
                detail::write_json_string(os, it.key());
                os << ": ";
                write_json(os, it.value(), indent + 1);
            }
            os << '\n' << pad << '}';
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            os << '[';
            bool first = true;
            for (const auto& el : j) {
                if (!first) os << ", ";
                first = false;
                write_json(os, el, indent + 1);
            }
            os << ']';
            return;
        }
        case json::value_t::string:
            detail::write_json_string(os, j.get<std::string>());
            return;
        case json::value_t::boolean:
            os << (j.get<bool>() ? "true" : "false");
            return;
        case json::value_t::number_integer:
        case json::value_t::number_unsigned:
            os << j.dump();
            return;
        case json::value_t::number_float:
            os << format_double(j.get<double>());
            return;
        default:
            os << "null";
            return;
    }
}

}  // namespace rcoase
