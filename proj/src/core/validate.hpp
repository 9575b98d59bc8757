#ifndef STRATOS_CORE_VALIDATE_HPP
#define STRATOS_CORE_VALIDATE_HPP

#include <vector>

#include "core/diagnostics.hpp"
#include "core/model.hpp"

namespace stratos {

// Overlay-aware validation. Layer rule: fact < business < contract, and
// references may only flow downward. A reference token that fails its own
// family but names an entity in a higher layer is a stratification breach
// rather than a plain unresolved reference.
Diagnostics validate_all(const WorldState& state, const std::vector<BusinessConfig>& businesses,
                         const std::vector<ContractConfig>& contract_configs);

Diagnostics validate_overlays(const WorldState& state,
                              const std::vector<BusinessConfig>& businesses,
                              const std::vector<ContractConfig>& contract_configs);

}  // namespace stratos

#endif
