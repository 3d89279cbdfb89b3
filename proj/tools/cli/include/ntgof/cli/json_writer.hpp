#pragma once

#include <nlohmann/json.hpp>

#include <string>

namespace ntgof::cli {

using Json = nlohmann::ordered_json;

/// Pretty-prints `value` with two-space indentation. Floating-point numbers
/// are written with 17 significant digits (non-finite values as null), so
/// the text is a deterministic, lossless function of the document.
std::string to_json_text(const Json& value);

}  // namespace ntgof::cli
