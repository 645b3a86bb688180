#pragma once

#include <string>

namespace lb::log {

// level from LATTICEBANDS_LOG (trace, debug, info, warn, error, off); default warn
void init();
void debug(const std::string& msg);
void info(const std::string& msg);
void warn(const std::string& msg);
void error(const std::string& msg);

}  // namespace lb::log
