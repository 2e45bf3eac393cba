#pragma once

#include <nlohmann/json.hpp>

#include "safemut/ad/architecture.hpp"

namespace safemut::net {

/// {"id", "input_width", "output_width", "layers": [{"type": "dense", "in",
/// "out", "activation", "bias"} | {"type": "recurrent", "in", "units",
/// "activation"} | {"type": "residual", "width", "activation", "skip_period"}
/// | {"type": "diagonal", "coefficients"}]}
nlohmann::json to_json(const ad::ArchitectureSpec& arch);
ad::ArchitectureSpec architecture_from_json(const nlohmann::json& j);

}  // namespace safemut::net
