#pragma once

#include <ostream>
#include <string>

#include "json.hpp"

namespace weakch::cli {

enum class Format { json, csv };

/// JSON with every floating-point number at 17 significant digits;
/// non-finite numbers become null.
void write_json(std::ostream& os, const nlohmann::json& j, int indent = 2);

/// "key,value" rows for every leaf, keys joined with '.'; array elements
/// are addressed by index.
void write_flat_csv(std::ostream& os, const nlohmann::json& j);

std::string format_double(double x);

}  // namespace weakch::cli
