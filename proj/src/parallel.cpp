#include "gyw/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace gyw {

int worker_count() {
  if (const char* env = std::getenv("GYW_WORKERS")) {
    int value = 0;
    const auto res = std::from_chars(env, env + std::strlen(env), value);
    if (res.ec == std::errc() && value > 0) return value;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace gyw
