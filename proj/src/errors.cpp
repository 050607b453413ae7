#include "flowsep/errors.hpp"

namespace flowsep {

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const ConfigError*>(&e) != nullptr) return 2;
  if (dynamic_cast<const NumericalError*>(&e) != nullptr) return 3;
  return 3;
}

}  // namespace flowsep
