#pragma once

#include <functional>
#include <string>

namespace lismimo {

using WarningSink = std::function<void(const std::string&)>;

// Warnings go to stderr unless a sink is installed. The sink is process-wide;
// install it before launching worker threads.
void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace lismimo
