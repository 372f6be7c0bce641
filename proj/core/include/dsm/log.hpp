#ifndef DSM_LOG_HPP
#define DSM_LOG_HPP

#include <string>

namespace dsm {

enum class LogLevel { error = 0, info = 1, debug = 2 };

/// Level parsed once from DSM_LOG (error|info|debug); default error.
LogLevel log_level();

void log_message(LogLevel level, const std::string& msg);

inline void log_error(const std::string& msg) { log_message(LogLevel::error, msg); }
inline void log_info(const std::string& msg) { log_message(LogLevel::info, msg); }
inline void log_debug(const std::string& msg) { log_message(LogLevel::debug, msg); }

}  // namespace dsm

#endif
