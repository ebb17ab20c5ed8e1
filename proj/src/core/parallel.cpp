#include "stablereg/parallel.hpp"

namespace stablereg {

namespace {
std::atomic<std::size_t> configured{0};
}

void set_thread_limit(std::size_t limit) { configured = limit; }

std::size_t thread_limit() {
  std::size_t limit = configured;
  if (limit == 0) limit = std::thread::hardware_concurrency();
  return limit == 0 ? 1 : limit;
}

}  // namespace stablereg
