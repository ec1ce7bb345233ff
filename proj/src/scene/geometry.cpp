#include "maestrob/scene/geometry.hpp"

#include <cmath>

namespace maestrob::scene {

Polygon rectangle(Vec2 center, double size_x, double size_y, double yaw) {
  double c = std::cos(yaw), s = std::sin(yaw);
  double hx = size_x / 2, hy = size_y / 2;
  Polygon out;
  out.reserve(4);
  for (auto [lx, ly] : {Vec2{hx, hy}, Vec2{-hx, hy}, Vec2{-hx, -hy}, Vec2{hx, -hy}})
    out.push_back({center.x + c * lx - s * ly, center.y + s * lx + c * ly});
  return out;
}

Polygon disc(Vec2 center, double diameter, int segments) {
  double r = diameter / 2;
  Polygon out;
  out.reserve(segments);
  for (int k = 0; k < segments; ++k) {
    double a = 2 * M_PI * k / segments;
    out.push_back({center.x + r * std::cos(a), center.y + r * std::sin(a)});
  }
  return out;
}

double area(const Polygon& p) {
  if (p.size() < 3) return 0;
  double twice = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    const Vec2& a = p[i];
    const Vec2& b = p[(i + 1) % p.size()];
    twice += a.x * b.y - a.y * b.x;
  }
  return std::abs(twice) / 2;
}

namespace {

double side(Vec2 a, Vec2 b, Vec2 p) {
  return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
}

Vec2 intersection(Vec2 a, Vec2 b, Vec2 p, Vec2 q) {
  double a1 = b.y - a.y, b1 = a.x - b.x, c1 = a1 * a.x + b1 * a.y;
  double a2 = q.y - p.y, b2 = p.x - q.x, c2 = a2 * p.x + b2 * p.y;
  double det = a1 * b2 - a2 * b1;
  return {(b2 * c1 - b1 * c2) / det, (a1 * c2 - a2 * c1) / det};
}

}  // namespace

Polygon clip(const Polygon& subject, const Polygon& bounds) {
  Polygon out = subject;
  for (size_t i = 0; i < bounds.size() && !out.empty(); ++i) {
    Vec2 a = bounds[i];
    Vec2 b = bounds[(i + 1) % bounds.size()];
    Polygon in = std::move(out);
    out.clear();
    for (size_t k = 0; k < in.size(); ++k) {
      Vec2 cur = in[k];
      Vec2 prev = in[(k + in.size() - 1) % in.size()];
      bool cur_in = side(a, b, cur) >= 0;
      bool prev_in = side(a, b, prev) >= 0;
      if (cur_in) {
        if (!prev_in) out.push_back(intersection(a, b, prev, cur));
        out.push_back(cur);
      } else if (prev_in) {
        out.push_back(intersection(a, b, prev, cur));
      }
    }
  }
  return out;
}

bool point_in_rectangle(Vec2 p, Vec2 center, double size_x, double size_y, double yaw) {
  double c = std::cos(yaw), s = std::sin(yaw);
  double dx = p.x - center.x, dy = p.y - center.y;
  double lx = c * dx + s * dy;
  double ly = -s * dx + c * dy;
  return std::abs(lx) <= size_x / 2 && std::abs(ly) <= size_y / 2;
}

bool point_in_disc(Vec2 p, Vec2 center, double diameter) {
  double dx = p.x - center.x, dy = p.y - center.y;
  double r = diameter / 2;
  return dx * dx + dy * dy <= r * r;
}

double quaternion_yaw(double w, double x, double y, double z) {
  return std::atan2(2 * (w * z + x * y), 1 - 2 * (y * y + z * z));
}

}  // namespace maestrob::scene
