#include "gapminer/parallel.hpp"

#include <cstdlib>
#include <string>

namespace gapminer {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("GAPMINER_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

}  // namespace gapminer
