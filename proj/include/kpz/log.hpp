#pragma once

#include <string_view>

namespace kpz {

// Warnings go to stderr unless silenced (the CLI silences them with --quiet).
void log_warning(std::string_view msg);
void set_warnings_enabled(bool enabled);

}  // namespace kpz
