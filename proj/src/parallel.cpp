#include "robinfluct/parallel.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace robinfluct {

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ROBIN_FLUCT_THREADS"); env && *env) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw std::invalid_argument(std::string("ROBIN_FLUCT_THREADS must be a positive integer, got '") +
                                env + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace robinfluct
