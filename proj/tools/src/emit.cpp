#include "emit.hpp"

#include <cinttypes>
#include <cstdio>

namespace cli {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

JsonObject& JsonObject::add(const std::string& key, double v) {
    fields_.emplace_back(key, fmt17(v));
    return *this;
}

JsonObject& JsonObject::add(const std::string& key, std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%" PRIu64, v);
    fields_.emplace_back(key, buf);
    return *this;
}

JsonObject& JsonObject::add(const std::string& key, const std::string& v) {
    std::string quoted = "\"";
    for (char c : v) {
        if (c == '"' || c == '\\') quoted += '\\';
        quoted += c;
    }
    quoted += '"';
    fields_.emplace_back(key, quoted);
    return *this;
}

std::string JsonObject::str() const {
    std::string s = "{";
    for (std::size_t i = 0; i < fields_.size(); ++i) {
        if (i) s += ",";
        s += "\"" + fields_[i].first + "\":" + fields_[i].second;
    }
    s += "}\n";
    return s;
}

std::string csv_line(const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) s += ",";
        s += cells[i];
    }
    s += "\n";
    return s;
}

} // namespace cli
