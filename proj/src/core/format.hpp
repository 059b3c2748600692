#pragma once

#include <cstdio>
#include <string>

namespace peakon {

/// Lossless text form of a double (17 significant digits).
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace peakon
