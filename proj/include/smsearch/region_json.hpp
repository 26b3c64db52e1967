#pragma once

#include "json.hpp"
#include "smsearch/geometry.hpp"

namespace smsearch {

// {"polygons":[{"outer":[[x,y],...],"holes":[[[x,y],...],...]}],"tag":"outer"}
nlohmann::json to_json(const GroundRegion& r);
GroundRegion region_from_json(const nlohmann::json& j);

}  // namespace smsearch
