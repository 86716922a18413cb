#pragma once

#include <iostream>
#include <string_view>

namespace netcov {

inline bool& warnings_enabled()
{
    static bool enabled = true;
    return enabled;
}

inline void warn(std::string_view msg)
{
    if (warnings_enabled()) std::cerr << "netcov: warning: " << msg << '\n';
}

} // namespace netcov
