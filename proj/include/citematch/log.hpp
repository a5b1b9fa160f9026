#pragma once

#include <functional>
#include <string_view>

namespace citematch {

// Warnings go to stderr unless a sink is installed. Thread-safe.
void warn(std::string_view message);
void set_warning_sink(std::function<void(std::string_view)> sink);

}  // namespace citematch
