#include "gem/version.hpp"

namespace gem {

const char* version() { return GEM_VERSION_STRING; }

}  // namespace gem
