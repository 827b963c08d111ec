#pragma once

#include <string>

namespace specbound {

/// Locale-independent "%.17g"-style rendering used by every CSV writer.
std::string format_double(double value);

}  // namespace specbound
