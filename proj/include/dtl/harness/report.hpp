#pragma once

#include <string>

#include <json.hpp>

namespace dtl::harness {

/// %.17g; non-finite values become "inf", "-inf" or "nan".
std::string format_number(double v);

/// JSON text with keys in sorted order and every float printed by
/// format_number (non-finite floats as strings). Byte-stable for equal input.
std::string canonical_dump(const nlohmann::json& doc);

/// Writes `text` to `path`, or to stdout when path is "-". Throws IoFailure.
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);
nlohmann::json read_json(const std::string& path);

}  // namespace dtl::harness
