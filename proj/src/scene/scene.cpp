#include "maestrob/scene/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "maestrob/errors.hpp"
#include "maestrob/scene/geometry.hpp"

namespace maestrob::scene {

namespace {

using nlohmann::json;

double positive_dim(const json& obj, const char* field, const std::string& kind_id) {
  if (!obj.contains(field) || !obj[field].is_number())
    throw ParseError(0, "kind '" + kind_id + "': missing numeric field '" + field + "'");
  double v = obj[field].get<double>();
  if (v <= 0)
    throw DimensionError("kind '" + kind_id + "': field '" + field + "' must be positive");
  return v;
}

Symbol parse_symbol(const json& obj, const char* field, const char* what) {
  if (!obj.contains(field) || !obj[field].is_string())
    throw ParseError(0, std::string(what) + ": missing string field '" + field + "'");
  std::string raw = obj[field].get<std::string>();
  if (!Symbol::valid(raw))
    throw ParseError(0, std::string(what) + ": '" + raw + "' is not a valid identifier");
  return Symbol(raw);
}

std::string meters(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9gm", v);
  return buf;
}

struct Body {
  const ObjectInstance* inst;
  const ObjectKind* kind;
  double yaw;

  double top() const { return inst->pose.z + kind->body_height() / 2; }
  double bottom() const { return inst->pose.z - kind->body_height() / 2; }
  Vec2 center() const { return {inst->pose.x, inst->pose.y}; }

  Polygon footprint() const {
    if (kind->shape.type == Shape::Type::Cylinder)
      return disc(center(), kind->shape.diameter);
    return rectangle(center(), kind->shape.size_x, kind->shape.size_y, yaw);
  }
};

bool inside_cavity_section(const Body& a, const Body& b) {
  const Cavity& c = *b.kind->cavity;
  if (c.type == Shape::Type::Cylinder) return point_in_disc(a.center(), b.center(), c.diameter);
  return point_in_rectangle(a.center(), b.center(), c.size_x, c.size_y, b.yaw);
}

// A's centroid inside B's cavity volume (cross-section extruded down
// `depth` from B's top face), and A reaching below B's top.
bool in_relation(const Body& a, const Body& b) {
  if (!b.kind->cavity) return false;
  double top = b.top();
  double z = a.inst->pose.z;
  if (z < top - b.kind->cavity->depth || z > top) return false;
  if (a.bottom() >= top) return false;
  return inside_cavity_section(a, b);
}

bool on_relation(const Body& a, const Body& b, const RelationParams& params) {
  if (std::abs(a.bottom() - b.top()) > params.eps_z) return false;
  Polygon fa = a.footprint();
  double base = area(fa);
  if (base <= 0) return false;
  return area(clip(fa, b.footprint())) >= params.min_overlap * base;
}

}  // namespace

std::vector<ObjectKind> load_object_db(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(0, e.what());
  }
  if (!doc.is_object() || !doc.contains("kinds") || !doc["kinds"].is_array())
    throw ParseError(0, "object db: expected top-level 'kinds' array");

  std::vector<ObjectKind> out;
  std::set<Symbol> ids;
  try {
  for (const json& jk : doc["kinds"]) {
    ObjectKind k;
    k.id = parse_symbol(jk, "id", "object db kind");
    if (!jk.contains("uri") || !jk["uri"].is_string())
      throw ParseError(0, "kind '" + k.id.str() + "': missing string field 'uri'");
    k.uri = jk["uri"].get<std::string>();
    if (k.uri.find(':') == std::string::npos)
      throw ParseError(0, "kind '" + k.id.str() + "': uri is not absolute");
    if (!ids.insert(k.id).second)
      throw ValidationError("duplicate kind id '" + k.id.str() + "'");

    if (!jk.contains("shape") || !jk["shape"].is_object())
      throw ParseError(0, "kind '" + k.id.str() + "': missing 'shape' object");
    const json& js = jk["shape"];
    std::string type = js.value("type", "");
    if (type == "cylinder") {
      k.shape.type = Shape::Type::Cylinder;
      k.shape.diameter = positive_dim(js, "diameter", k.id.str());
      k.shape.height = positive_dim(js, "height", k.id.str());
    } else if (type == "cuboid") {
      k.shape.type = Shape::Type::Cuboid;
      k.shape.size_x = positive_dim(js, "size_x", k.id.str());
      k.shape.size_y = positive_dim(js, "size_y", k.id.str());
      k.shape.size_z = positive_dim(js, "size_z", k.id.str());
    } else {
      throw ParseError(0, "kind '" + k.id.str() + "': shape type must be cylinder or cuboid");
    }

    if (jk.contains("cavity")) {
      if (!jk["cavity"].is_object())
        throw ParseError(0, "kind '" + k.id.str() + "': 'cavity' must be an object");
      const json& jc = jk["cavity"];
      Cavity c;
      std::string ctype = jc.value("type", "");
      if (ctype == "cylinder") {
        c.type = Shape::Type::Cylinder;
        c.diameter = positive_dim(jc, "diameter", k.id.str());
      } else if (ctype == "cuboid") {
        c.type = Shape::Type::Cuboid;
        c.size_x = positive_dim(jc, "size_x", k.id.str());
        c.size_y = positive_dim(jc, "size_y", k.id.str());
      } else {
        throw ParseError(0, "kind '" + k.id.str() + "': cavity type must be cylinder or cuboid");
      }
      c.depth = positive_dim(jc, "depth", k.id.str());
      if (c.depth > k.body_height())
        throw DimensionError("kind '" + k.id.str() + "': cavity deeper than the body");

      // cross-section containment in the body footprint
      double cx = c.type == Shape::Type::Cylinder ? c.diameter : c.size_x;
      double cy = c.type == Shape::Type::Cylinder ? c.diameter : c.size_y;
      bool fits;
      if (k.shape.type == Shape::Type::Cuboid) {
        fits = cx <= k.shape.size_x && cy <= k.shape.size_y;
      } else if (c.type == Shape::Type::Cylinder) {
        fits = c.diameter <= k.shape.diameter;
      } else {
        fits = std::hypot(c.size_x, c.size_y) <= k.shape.diameter;
      }
      if (!fits) throw DimensionError("kind '" + k.id.str() + "': cavity wider than the body");
      k.cavity = c;
    }
    out.push_back(std::move(k));
  }
  } catch (const json::exception& e) {
    throw ParseError(0, e.what());
  }
  return out;
}

std::vector<ObjectInstance> load_scene(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(0, e.what());
  }
  if (!doc.is_object() || !doc.contains("objects") || !doc["objects"].is_array())
    throw ParseError(0, "scene: expected top-level 'objects' array");

  std::vector<ObjectInstance> out;
  std::set<Symbol> ids;
  try {
  for (const json& jo : doc["objects"]) {
    ObjectInstance inst;
    inst.id = parse_symbol(jo, "id", "scene object");
    inst.kind = parse_symbol(jo, "kind", "scene object");
    if (!ids.insert(inst.id).second)
      throw ValidationError("duplicate instance id '" + inst.id.str() + "'");

    if (!jo.contains("position") || !jo["position"].is_array() || jo["position"].size() != 3)
      throw ParseError(0, "object '" + inst.id.str() + "': position must be [x, y, z]");
    inst.pose.x = jo["position"][0].get<double>();
    inst.pose.y = jo["position"][1].get<double>();
    inst.pose.z = jo["position"][2].get<double>();

    if (!jo.contains("orientation") || !jo["orientation"].is_array() ||
        jo["orientation"].size() != 4)
      throw ParseError(0, "object '" + inst.id.str() + "': orientation must be [w, x, y, z]");
    inst.pose.qw = jo["orientation"][0].get<double>();
    inst.pose.qx = jo["orientation"][1].get<double>();
    inst.pose.qy = jo["orientation"][2].get<double>();
    inst.pose.qz = jo["orientation"][3].get<double>();
    double norm = std::sqrt(inst.pose.qw * inst.pose.qw + inst.pose.qx * inst.pose.qx +
                            inst.pose.qy * inst.pose.qy + inst.pose.qz * inst.pose.qz);
    if (std::abs(norm - 1.0) > 1e-6)
      throw ValidationError("object '" + inst.id.str() + "': orientation is not a unit quaternion");
    out.push_back(std::move(inst));
  }
  } catch (const json::exception& e) {
    throw ParseError(0, e.what());
  }
  return out;
}

std::vector<Fact> extract_relations(const std::vector<ObjectInstance>& instances,
                                    const std::vector<ObjectKind>& kinds,
                                    const RelationParams& params) {
  std::map<Symbol, const ObjectKind*> by_id;
  for (const ObjectKind& k : kinds) by_id[k.id] = &k;

  std::vector<Body> bodies;
  bodies.reserve(instances.size());
  for (const ObjectInstance& inst : instances) {
    auto it = by_id.find(inst.kind);
    if (it == by_id.end()) throw UnknownKindError(inst.id.str());
    bodies.push_back(
        {&inst, it->second,
         quaternion_yaw(inst.pose.qw, inst.pose.qx, inst.pose.qy, inst.pose.qz)});
  }

  std::vector<Fact> facts;
  auto emit = [&](const char* pred, const Body& a, const Body& b) {
    facts.push_back({Symbol(pred), {a.inst->id, b.inst->id}});
  };

  std::set<Symbol> filled;
  for (const Body& a : bodies) {
    for (const Body& b : bodies) {
      if (a.inst == b.inst) continue;
      bool in_ab = in_relation(a, b);
      if (in_ab) {
        emit("in", a, b);
        filled.insert(b.inst->id);
      } else if (on_relation(a, b, params)) {
        emit("on", a, b);
      }
      double dx = b.inst->pose.x - a.inst->pose.x;
      double dy = b.inst->pose.y - a.inst->pose.y;
      if (std::abs(dy) < params.lateral) {
        if (dx >= params.delta) emit("left", a, b);
        if (-dx >= params.delta) emit("right", a, b);
      }
      if (std::abs(dx) < params.lateral) {
        if (dy >= params.delta) emit("front", a, b);
        if (-dy >= params.delta) emit("back", a, b);
      }
    }
  }
  for (const Body& b : bodies) {
    if (!b.kind->cavity) continue;
    facts.push_back(
        {Symbol(filled.count(b.inst->id) ? "filled" : "empty"), {b.inst->id}});
  }
  std::sort(facts.begin(), facts.end());
  facts.erase(std::unique(facts.begin(), facts.end()), facts.end());
  return facts;
}

SceneState extract_state(const std::vector<ObjectInstance>& instances,
                         const std::vector<ObjectKind>& kinds, const RelationParams& params) {
  SceneState state;
  state.instances = instances;
  state.facts = extract_relations(instances, kinds, params);
  for (const ObjectInstance& inst : instances)
    state.facts.push_back({Symbol("is"), {inst.id, inst.kind}});
  std::sort(state.facts.begin(), state.facts.end());
  state.facts.erase(std::unique(state.facts.begin(), state.facts.end()), state.facts.end());
  return state;
}

const std::set<Symbol>& fact_vocabulary() {
  static const std::set<Symbol> vocab = {Symbol("in"),    Symbol("on"),     Symbol("left"),
                                         Symbol("right"), Symbol("front"),  Symbol("back"),
                                         Symbol("filled"), Symbol("empty"), Symbol("is")};
  return vocab;
}

std::pair<std::vector<Fact>, std::vector<Fact>> diff_states(const SceneState& a,
                                                            const SceneState& b) {
  std::vector<Fact> added, removed;
  std::set_difference(b.facts.begin(), b.facts.end(), a.facts.begin(), a.facts.end(),
                      std::back_inserter(added));
  std::set_difference(a.facts.begin(), a.facts.end(), b.facts.begin(), b.facts.end(),
                      std::back_inserter(removed));
  return {std::move(added), std::move(removed)};
}

std::string property_triples(const std::vector<ObjectKind>& kinds) {
  std::ostringstream out;
  for (const ObjectKind& k : kinds) {
    const std::string& u = k.uri;
    if (k.shape.type == Shape::Type::Cylinder) {
      out << u << " maestrob:prop/shape \"cylinder\"\n";
      out << u << " maestrob:prop/diameter " << meters(k.shape.diameter) << "\n";
      out << u << " maestrob:prop/height " << meters(k.shape.height) << "\n";
    } else {
      out << u << " maestrob:prop/shape \"cuboid\"\n";
      out << u << " maestrob:prop/size-x " << meters(k.shape.size_x) << "\n";
      out << u << " maestrob:prop/size-y " << meters(k.shape.size_y) << "\n";
      out << u << " maestrob:prop/size-z " << meters(k.shape.size_z) << "\n";
    }
    if (k.cavity) {
      const Cavity& c = *k.cavity;
      if (c.type == Shape::Type::Cylinder) {
        out << u << " maestrob:prop/cavity-shape \"cylinder\"\n";
        out << u << " maestrob:prop/cavity-diameter " << meters(c.diameter) << "\n";
      } else {
        out << u << " maestrob:prop/cavity-shape \"cuboid\"\n";
        out << u << " maestrob:prop/cavity-size-x " << meters(c.size_x) << "\n";
        out << u << " maestrob:prop/cavity-size-y " << meters(c.size_y) << "\n";
      }
      out << u << " maestrob:prop/cavity-depth " << meters(c.depth) << "\n";
    }
  }
  return out.str();
}

}  // namespace maestrob::scene
