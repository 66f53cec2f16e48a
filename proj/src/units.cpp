#include "gsmlayer/units.hpp"

#include <cctype>
#include <cstdlib>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gsml {

namespace {

using unit_table = std::vector<std::pair<const char*, double>>;

const unit_table& table_for(const std::string& dimension) {
    static const unit_table frequency = {
        {"THz", 1e12}, {"GHz", 1e9}, {"MHz", 1e6}, {"kHz", 1e3}, {"Hz", 1.0}};
    static const unit_table length = {
        {"km", 1e3}, {"cm", 1e-2}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}, {"m", 1.0}};
    static const unit_table conductivity = {
        {"MS/m", 1e6}, {"kS/m", 1e3}, {"mS/m", 1e-3}, {"uS/m", 1e-6}, {"S/m", 1.0}};
    static const unit_table none = {};
    if (dimension == "frequency") return frequency;
    if (dimension == "length") return length;
    if (dimension == "conductivity") return conductivity;
    if (dimension == "dimensionless") return none;
    throw std::invalid_argument("parse_quantity: unknown dimension '" + dimension + "'");
}

} // namespace

double parse_quantity(const std::string& text, const std::string& dimension) {
    std::size_t lo = 0, hi = text.size();
    while (lo < hi && std::isspace(static_cast<unsigned char>(text[lo]))) ++lo;
    while (hi > lo && std::isspace(static_cast<unsigned char>(text[hi - 1]))) --hi;
    const std::string body = text.substr(lo, hi - lo);
    if (body.empty())
        throw std::invalid_argument("parse_quantity: empty quantity");

    // split trailing unit token (letters and '/') from the numeric part
    std::size_t split = body.size();
    while (split > 0) {
        const char c = body[split - 1];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '/') --split;
        else break;
    }
    std::string number = body.substr(0, split);
    std::string unit = body.substr(split);
    while (!number.empty() && std::isspace(static_cast<unsigned char>(number.back())))
        number.pop_back();

    if (number.empty())
        throw std::invalid_argument("parse_quantity: no numeric part in '" + text + "'");
    char* end = nullptr;
    const double value = std::strtod(number.c_str(), &end);
    if (end == number.c_str() || *end != '\0')
        throw std::invalid_argument("parse_quantity: bad number in '" + text + "'");

    // validate the dimension before any early return so a typo in the caller
    // surfaces even when the config value happens to be a bare number
    const unit_table& table = table_for(dimension);
    if (unit.empty()) return value;  // already SI / dimensionless
    for (const auto& [name, scale] : table)
        if (unit == name) return value * scale;
    throw std::invalid_argument("parse_quantity: unit '" + unit + "' not valid for " +
                                dimension + " in '" + text + "'");
}

} // namespace gsml
