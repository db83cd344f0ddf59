#include "output.hpp"

#include <cmath>
#include <cstdio>

namespace weakch::cli {

std::string format_double(double x) {
    if (!std::isfinite(x)) return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s = buf;
    // keep a marker that the value is floating point
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

namespace {

void write(std::ostream& os, const nlohmann::json& j, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << '{' << nl;
            bool first = true;
            for (const auto& [k, v] : j.items()) {
                if (!first) os << ',' << nl;
                first = false;
                os << pad << nlohmann::json(k).dump() << (indent > 0 ? ": " : ":");
                write(os, v, indent, depth + 1);
            }
            os << nl << close_pad << '}';
            return;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            // short arrays of scalars stay on one line
            bool flat = j.size() <= 16;
            for (const auto& v : j) flat = flat && v.is_primitive();
            os << '[' << (flat ? "" : nl);
            bool first = true;
            for (const auto& v : j) {
                if (!first) os << ',' << (flat ? " " : nl);
                first = false;
                if (!flat) os << pad;
                write(os, v, indent, depth + 1);
            }
            if (!flat) os << nl << close_pad;
            os << ']';
            return;
        }
        case nlohmann::json::value_t::number_float:
            os << format_double(j.get<double>());
            return;
        default:
            os << j.dump();
    }
}

void flatten(std::ostream& os, const nlohmann::json& j, const std::string& prefix) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(os, v, prefix.empty() ? k : prefix + "." + k);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(os, j[i], prefix + "." + std::to_string(i));
    } else {
        os << prefix << ',';
        if (j.is_number_float()) {
            os << format_double(j.get<double>());
        } else if (j.is_string()) {
            const auto s = j.get<std::string>();
            if (s.find_first_of(",\"\n") != std::string::npos) {
                os << '"';
                for (char c : s) os << (c == '"' ? std::string("\"\"") : std::string(1, c));
                os << '"';
            } else {
                os << s;
            }
        } else {
            os << j.dump();
        }
        os << '\n';
    }
}

}  // namespace

void write_json(std::ostream& os, const nlohmann::json& j, int indent) {
    write(os, j, indent, 0);
    os << '\n';
}

void write_flat_csv(std::ostream& os, const nlohmann::json& j) {
    os << "key,value\n";
    flatten(os, j, "");
}

}  // namespace weakch::cli
