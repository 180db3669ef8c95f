#include "biphoton/parallel.hpp"

#include <cstdlib>
#include <string>

namespace biphoton {

std::size_t worker_count() {
  std::size_t count = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BIPHOTON_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) count = std::min(count, static_cast<std::size_t>(cap));
    } catch (const std::exception&) {
    }
  }
  return count;
}

}  // namespace biphoton
