#pragma once

#include <json.hpp>

#include "gsr/model.hpp"

namespace gsr::detail {

nlohmann::ordered_json literal_to_json(const Literal& lit);
Literal literal_from_json(const nlohmann::ordered_json& j);

}  // namespace gsr::detail
