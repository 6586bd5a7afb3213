#ifndef FRACQ_IO_HPP
#define FRACQ_IO_HPP

#include <cstdio>
#include <string>

namespace fracq {

/// Number formatting shared by all CSV writers: 12 significant digits, scientific.
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

}  // namespace fracq

#endif  // FRACQ_IO_HPP
