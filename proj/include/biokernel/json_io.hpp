#pragma once

#include "biokernel/kernels.hpp"
#include "biokernel/wcatalog.hpp"

#include <json.hpp>

namespace biokernel::json_io {

using nlohmann::json;

json to_json(const wcatalog::WFunction& w);
wcatalog::WFunction w_from_json(const json& j);

json to_json(const kernels::EnsembleSpec& spec);
kernels::EnsembleSpec spec_from_json(const json& j);

QuadratureSettings settings_from_json(const json& j); // missing keys -> defaults
kernels::ContourPlan plan_from_json(const json& j, const kernels::EnsembleSpec& spec);

} // namespace biokernel::json_io
