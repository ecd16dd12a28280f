#pragma once

#include <functional>
#include <iostream>
#include <string>
#include <utility>

namespace casimir {

/// Non-fatal diagnostics (renormalized histograms, out-of-range fits, ...)
/// are routed through a process-wide handler so that library code never
/// decides where warnings go. Default: stderr.
inline std::function<void(const std::string&)>& warning_handler() {
    static std::function<void(const std::string&)> handler =
        [](const std::string& msg) { std::cerr << "[casimir] warning: " << msg << "\n"; };
    return handler;
}

inline void warn(std::string msg) { warning_handler()(std::move(msg)); }

/// RAII scope that captures warnings into a vector (used by tests and the CLI).
class WarningCapture {
public:
    explicit WarningCapture(std::vector<std::string>& sink) : previous_(warning_handler()) {
        warning_handler() = [&sink](const std::string& m) { sink.push_back(m); };
    }
    ~WarningCapture() { warning_handler() = previous_; }
    WarningCapture(const WarningCapture&) = delete;
    WarningCapture& operator=(const WarningCapture&) = delete;

private:
    std::function<void(const std::string&)> previous_;
};

} // namespace casimir
