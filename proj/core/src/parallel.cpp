#include "isoperc/parallel.hpp"

namespace isoperc {

unsigned default_threads() noexcept {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

} // namespace isoperc
