#pragma once

#include <cstdio>
#include <string>

namespace twinsim {

// Shortest representation at 12 significant digits; used everywhere CSV or
// tabular output must be byte-stable.
inline std::string g12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

}  // namespace twinsim
