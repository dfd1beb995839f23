#pragma once

#include <functional>
#include <string_view>

namespace upsilon {

using WarningSink = std::function<void(std::string_view)>;

/// Emit a non-fatal diagnostic. Defaults to stderr.
void warn(std::string_view message);

/// Replace the warning sink; returns the previous one.
WarningSink set_warning_sink(WarningSink sink);

}  // namespace upsilon
