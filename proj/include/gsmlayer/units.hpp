#pragma once

// Quantity parsing for the declarative config: numbers with explicit unit
// suffixes ("3.5 GHz", "-200 mm", "10 S/m"), converted to SI on ingestion.

#include <string>

namespace gsml {

// dimension is one of "frequency", "length", "conductivity", "dimensionless";
// a bare number is taken as already-SI (Hz, m, S/m) or dimensionless
double parse_quantity(const std::string& text, const std::string& dimension);

} // namespace gsml
