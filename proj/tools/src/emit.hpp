#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cli {

// 17 significant digits, '.' decimal point, no locale surprises.
std::string fmt17(double v);

// Flat JSON object with caller-controlled key order, one line, LF-terminated.
class JsonObject {
public:
    JsonObject& add(const std::string& key, double v);
    JsonObject& add(const std::string& key, std::uint64_t v);
    JsonObject& add(const std::string& key, const std::string& v);
    std::string str() const;

private:
    std::vector<std::pair<std::string, std::string>> fields_;
};

std::string csv_line(const std::vector<std::string>& cells);

} // namespace cli
