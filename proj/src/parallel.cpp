#include "tikhochaos/parallel.hpp"

#include <cstdlib>
#include <string>

namespace tikhochaos {

int worker_count() {
    if (const char* env = std::getenv("CHAOS_THREADS"); env && *env) {
        try {
            const int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace tikhochaos
