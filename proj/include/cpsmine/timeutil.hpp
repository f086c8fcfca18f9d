#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cpsmine {

// "2025-03-10T09:00:00.250Z" -> UTC epoch milliseconds. Fractional seconds
// optional (1..9 digits, truncated to ms); trailing "Z" optional, no other
// zone designators.
std::optional<int64_t> parse_iso8601_ms(std::string_view s);

// Always emits millisecond precision with a trailing Z.
std::string format_iso8601_ms(int64_t epoch_ms);

}  // namespace cpsmine
