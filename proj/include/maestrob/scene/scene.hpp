#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "maestrob/fact.hpp"
#include "maestrob/symbol.hpp"

namespace maestrob::scene {

struct Pose {
  double x = 0, y = 0, z = 0;          // meters, world frame, body centroid
  double qw = 1, qx = 0, qy = 0, qz = 0;  // unit quaternion (w, x, y, z)
};

struct Shape {
  enum class Type { Cylinder, Cuboid };
  Type type = Type::Cuboid;
  double diameter = 0, height = 0;        // cylinder
  double size_x = 0, size_y = 0, size_z = 0;  // cuboid
};

// Opening in the top face, centered on the body axis.
struct Cavity {
  Shape::Type type = Shape::Type::Cylinder;
  double diameter = 0;           // cylinder cross-section
  double size_x = 0, size_y = 0;  // cuboid cross-section
  double depth = 0;
};

struct ObjectKind {
  Symbol id;
  std::string uri;
  Shape shape;
  std::optional<Cavity> cavity;

  double body_height() const {
    return shape.type == Shape::Type::Cylinder ? shape.height : shape.size_z;
  }
};

struct ObjectInstance {
  Symbol id;
  Symbol kind;
  Pose pose;
};

// Margins of the relation definitions; the defaults are the contract the
// test suite pins.
struct RelationParams {
  double eps_z = 0.005;      // on: vertical contact tolerance
  double delta = 0.01;       // left/right/front/back: minimum axis offset
  double lateral = 0.15;     // left/right/front/back: cross-axis gate
  double min_overlap = 0.5;  // on: fraction of A's footprint over B
};

struct SceneState {
  std::vector<ObjectInstance> instances;
  std::vector<Fact> facts;  // sorted; always the extractor's output
};

// Object-db file: {"kinds": [{id, uri, shape: {type, ...}, cavity?: {...}}]}.
// Lengths in meters. Throws ParseError on malformed input, DimensionError
// on non-positive dimensions or a cavity overflowing the body.
std::vector<ObjectKind> load_object_db(std::string_view text);

// Scene file: {"objects": [{id, kind, position: [x,y,z],
// orientation: [w,x,y,z]}]}. Throws ParseError; ValidationError on
// duplicate ids or a non-unit quaternion.
std::vector<ObjectInstance> load_scene(std::string_view text);

// The six spatial relations over ordered pairs plus filled/empty for
// cavity-bearing instances. Pure; sorted output. Throws UnknownKindError.
std::vector<Fact> extract_relations(const std::vector<ObjectInstance>& instances,
                                    const std::vector<ObjectKind>& kinds,
                                    const RelationParams& params);

// Relations plus kind-membership facts `(is <instance> <kind-id>)`.
SceneState extract_state(const std::vector<ObjectInstance>& instances,
                         const std::vector<ObjectKind>& kinds, const RelationParams& params);

// Every predicate extract_state can emit, independent of any frame.
const std::set<Symbol>& fact_vocabulary();

std::pair<std::vector<Fact>, std::vector<Fact>> diff_states(const SceneState& a,
                                                            const SceneState& b);

// Kind dimensions as ontology triples (maestrob:prop/* vocabulary), the
// bridge feeding physical properties to constraint guards.
std::string property_triples(const std::vector<ObjectKind>& kinds);

}  // namespace maestrob::scene
