#include "loopscope/parallel.hpp"

#include <cstdlib>
#include <string>

namespace loopscope {

std::size_t default_worker_count() {
  if (const char* env = std::getenv("LOOPSCOPE_THREADS")) {
    try {
      const long long v = std::stoll(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      // fall through to hardware default
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace loopscope
