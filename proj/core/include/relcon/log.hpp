#pragma once

#include <functional>
#include <string>

namespace relcon {

using WarningSink = std::function<void(const std::string&)>;

/// Routes library warnings. The default sink writes to stderr.
void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace relcon
