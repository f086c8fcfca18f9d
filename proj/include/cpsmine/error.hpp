#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cpsmine {

// Every recoverable failure carries a stable machine-readable kind
// (e.g. "MalformedRow", "UnknownIndicator") next to the human message.
class CpsError : public std::runtime_error {
public:
    CpsError(std::string kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

}  // namespace cpsmine
