#pragma once

#include <string>

namespace tl1mc {

/// Shortest decimal that reads back to the same double.
std::string format_double(double x);

} // namespace tl1mc
