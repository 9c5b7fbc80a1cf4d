#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace nuwean {

// All library failures are reported through this type. `stage` is a short
// tag ("wrangle", "nudft", "svm", ...) that the CLI prints with the message.
class Error : public std::runtime_error {
public:
    Error(std::string stage, std::string message)
        : std::runtime_error("[" + stage + "] " + message),
          stage_(std::move(stage)),
          message_(std::move(message)) {}

    const std::string& stage() const noexcept { return stage_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string stage_;
    std::string message_;
};

} // namespace nuwean
