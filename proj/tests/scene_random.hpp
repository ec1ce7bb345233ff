#pragma once

// Seeded random tabletop scenes over a fixed kind pool, plus the
// threshold-distance gauge the jitter-robustness check needs. Shared by
// the scene suite and the acceptance gate.

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "maestrob/scene/geometry.hpp"
#include "maestrob/scene/scene.hpp"

namespace testsupport {

// Kind pool for randomized scenes, built directly.
inline std::vector<maestrob::scene::ObjectKind> test_kinds() {
  using namespace maestrob;
  using namespace maestrob::scene;
  std::vector<ObjectKind> ks(6);
  ks[0] = {Symbol("box-small"), "t:box-small", {Shape::Type::Cuboid, 0, 0, 0.04, 0.04, 0.06}, {}};
  ks[1] = {Symbol("box-flat"), "t:box-flat", {Shape::Type::Cuboid, 0, 0, 0.10, 0.08, 0.02}, {}};
  ks[2] = {Symbol("cyl-small"), "t:cyl-small", {Shape::Type::Cylinder, 0.03, 0.04, 0, 0, 0}, {}};
  ks[3] = {Symbol("cyl-fat"), "t:cyl-fat", {Shape::Type::Cylinder, 0.08, 0.03, 0, 0, 0}, {}};
  ks[4] = {Symbol("cup"),
           "t:cup",
           {Shape::Type::Cuboid, 0, 0, 0.09, 0.09, 0.05},
           Cavity{Shape::Type::Cylinder, 0.05, 0, 0, 0.04}};
  ks[5] = {Symbol("tray"),
           "t:tray",
           {Shape::Type::Cuboid, 0, 0, 0.14, 0.12, 0.03},
           Cavity{Shape::Type::Cuboid, 0, 0.10, 0.08, 0.02}};
  return ks;
}

inline const maestrob::scene::ObjectKind& kind_of(
    const std::vector<maestrob::scene::ObjectKind>& ks, const maestrob::Symbol& id) {
  for (const auto& k : ks)
    if (k.id == id) return k;
  throw std::runtime_error("no kind " + id.str());
}

inline double height_of(const maestrob::scene::ObjectKind& k) { return k.body_height(); }

inline std::vector<maestrob::scene::ObjectInstance> random_scene(
    std::mt19937& rng, const std::vector<maestrob::scene::ObjectKind>& ks) {
  using namespace maestrob;
  using namespace maestrob::scene;
  std::uniform_real_distribution<double> ux(-0.25, 0.25), uy(-0.18, 0.18), u01(0, 1);
  int n = 1 + static_cast<int>(rng() % 5);
  std::vector<ObjectInstance> out;
  for (int i = 0; i < n; ++i) {
    const ObjectKind& k = ks[rng() % ks.size()];
    double h = height_of(k);
    double x = ux(rng), y = uy(rng), z;
    double mode = u01(rng);
    if (!out.empty() && mode < 0.25) {
      // stack on an earlier object
      const ObjectInstance& below = out[rng() % out.size()];
      const ObjectKind& bk = kind_of(ks, below.kind);
      x = below.pose.x + (u01(rng) - 0.5) * 0.02;
      y = below.pose.y + (u01(rng) - 0.5) * 0.02;
      z = below.pose.z + height_of(bk) / 2 + h / 2 + (u01(rng) - 0.5) * 0.006;
    } else if (!out.empty() && mode < 0.45) {
      // try to seat into an earlier cavity
      const ObjectInstance& below = out[rng() % out.size()];
      const ObjectKind& bk = kind_of(ks, below.kind);
      if (bk.cavity) {
        x = below.pose.x + (u01(rng) - 0.5) * 0.01;
        y = below.pose.y + (u01(rng) - 0.5) * 0.01;
        double top = below.pose.z + height_of(bk) / 2;
        z = top - bk.cavity->depth + h / 2;
        if (z > top) z = top - 0.001;
      } else {
        z = h / 2;
      }
    } else if (mode < 0.8) {
      z = h / 2;  // resting on the work plane
    } else {
      z = h / 2 + 0.005 + u01(rng) * 0.08;  // hovering
    }
    double yaw = u01(rng) * 2 * M_PI;
    ObjectInstance inst;
    inst.id = Symbol("o" + std::to_string(i));
    inst.kind = k.id;
    inst.pose = {x, y, z, std::cos(yaw / 2), 0, 0, std::sin(yaw / 2)};
    out.push_back(inst);
  }
  return out;
}

// Definitional slack of every margin comparison in the scene, in meters
// (overlap ratios are dimensionless but share the 1e-6 eligibility gate).
inline double min_threshold_distance(const std::vector<maestrob::scene::ObjectInstance>& objs,
                                     const std::vector<maestrob::scene::ObjectKind>& ks,
                                     const maestrob::scene::RelationParams& p) {
  using namespace maestrob;
  using namespace maestrob::scene;
  double best = 1e9;
  auto upd = [&](double d) { best = std::min(best, std::abs(d)); };
  for (const auto& a : objs) {
    const ObjectKind& ak = kind_of(ks, a.kind);
    double ayaw = quaternion_yaw(a.pose.qw, a.pose.qx, a.pose.qy, a.pose.qz);
    for (const auto& b : objs) {
      if (&a == &b) continue;
      const ObjectKind& bk = kind_of(ks, b.kind);
      double byaw = quaternion_yaw(b.pose.qw, b.pose.qx, b.pose.qy, b.pose.qz);
      double abot = a.pose.z - height_of(ak) / 2;
      double btop = b.pose.z + height_of(bk) / 2;
      upd(std::abs(abot - btop) - p.eps_z);
      double dx = b.pose.x - a.pose.x, dy = b.pose.y - a.pose.y;
      upd(dx - p.delta);
      upd(-dx - p.delta);
      upd(dy - p.delta);
      upd(-dy - p.delta);
      upd(std::abs(dy) - p.lateral);
      upd(std::abs(dx) - p.lateral);
      if (bk.cavity) {
        upd(a.pose.z - (btop - bk.cavity->depth));
        upd(a.pose.z - btop);
        upd(abot - btop);
        if (bk.cavity->type == Shape::Type::Cylinder) {
          double dist = std::hypot(a.pose.x - b.pose.x, a.pose.y - b.pose.y);
          upd(dist - bk.cavity->diameter / 2);
        } else {
          double c = std::cos(byaw), s = std::sin(byaw);
          double lx = c * (a.pose.x - b.pose.x) + s * (a.pose.y - b.pose.y);
          double ly = -s * (a.pose.x - b.pose.x) + c * (a.pose.y - b.pose.y);
          upd(std::abs(lx) - bk.cavity->size_x / 2);
          upd(std::abs(ly) - bk.cavity->size_y / 2);
        }
      }
      // overlap-ratio distance from the 50% threshold
      Polygon fa = ak.shape.type == Shape::Type::Cylinder
                       ? disc({a.pose.x, a.pose.y}, ak.shape.diameter)
                       : rectangle({a.pose.x, a.pose.y}, ak.shape.size_x, ak.shape.size_y, ayaw);
      Polygon fb = bk.shape.type == Shape::Type::Cylinder
                       ? disc({b.pose.x, b.pose.y}, bk.shape.diameter)
                       : rectangle({b.pose.x, b.pose.y}, bk.shape.size_x, bk.shape.size_y, byaw);
      double base = area(fa);
      if (base > 0) upd(area(clip(fa, fb)) / base - p.min_overlap);
    }
  }
  return best;
}

}  // namespace testsupport
