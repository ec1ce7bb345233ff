#pragma once

#include <vector>

namespace maestrob::scene {

struct Vec2 {
  double x = 0;
  double y = 0;
};

// Convex polygon, counter-clockwise winding.
using Polygon = std::vector<Vec2>;

Polygon rectangle(Vec2 center, double size_x, double size_y, double yaw);

// Regular n-gon inscribed in the circle, the footprint stand-in for
// cylinders. n = 64 keeps the area error below 0.2%.
Polygon disc(Vec2 center, double diameter, int segments = 64);

double area(const Polygon& p);

// Sutherland-Hodgman intersection of two convex polygons.
Polygon clip(const Polygon& subject, const Polygon& bounds);

bool point_in_rectangle(Vec2 p, Vec2 center, double size_x, double size_y, double yaw);
bool point_in_disc(Vec2 p, Vec2 center, double diameter);

double quaternion_yaw(double w, double x, double y, double z);

}  // namespace maestrob::scene
