#pragma once

#include <string>

#include <json.hpp>

#include "edgeflow/util/errors.hpp"

namespace edgeflow::util {

// ordered_json keeps object members in document order; flow definitions are
// ordered maps and run logs must serialize deterministically.
using Json = nlohmann::ordered_json;

// Parse that rejects duplicate object keys (nlohmann's default silently
// keeps the last one, which would mask duplicate flow states).
Json parse_json_strict(const std::string& text, const std::string& origin = "<string>");

Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

}  // namespace edgeflow::util
