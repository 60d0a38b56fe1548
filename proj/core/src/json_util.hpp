#pragma once

#include <json.hpp>

#include "vwpinn/errors.hpp"

namespace vwpinn {
using nlohmann::json;
}
