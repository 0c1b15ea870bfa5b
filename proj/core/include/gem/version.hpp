#pragma once

namespace gem {

/// Library version, "major.minor.patch".
const char* version();

}  // namespace gem
