#include "smsearch/region_json.hpp"

#include <stdexcept>

namespace smsearch {

namespace {

nlohmann::json ring_json(const Ring& r) {
  auto a = nlohmann::json::array();
  for (const auto& g : r) a.push_back({from_grid(g.x), from_grid(g.y)});
  return a;
}

Ring ring_from(const nlohmann::json& a) {
  if (!a.is_array()) throw std::invalid_argument("region ring must be an array of [x,y]");
  Ring r;
  for (const auto& p : a) {
    if (!p.is_array() || p.size() != 2) throw std::invalid_argument("region vertex must be [x,y]");
    r.push_back({to_grid(p[0].get<double>()), to_grid(p[1].get<double>())});
  }
  return r;
}

}  // namespace

nlohmann::json to_json(const GroundRegion& r) {
  auto polys = nlohmann::json::array();
  for (const auto& p : r.polygons()) {
    auto holes = nlohmann::json::array();
    for (const auto& h : p.holes) holes.push_back(ring_json(h));
    polys.push_back({{"outer", ring_json(p.outer)}, {"holes", holes}});
  }
  return {{"polygons", polys}, {"tag", tag_name(r.tag())}};
}

GroundRegion region_from_json(const nlohmann::json& j) {
  std::vector<Polygon> polys;
  for (const auto& p : j.at("polygons")) {
    Polygon poly;
    poly.outer = ring_from(p.at("outer"));
    if (p.contains("holes"))
      for (const auto& h : p.at("holes")) poly.holes.push_back(ring_from(h));
    polys.push_back(std::move(poly));
  }
  return GroundRegion(std::move(polys), tag_from_name(j.at("tag").get<std::string>().c_str()));
}

}  // namespace smsearch
