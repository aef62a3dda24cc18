#pragma once

#include <array>
#include <cmath>

namespace sscmg {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

// Midpoints of dyadic coordinates are exact in binary floating point, so
// repeated refinement reproduces vertex coordinates bit for bit.
inline Vec2 midpoint(Vec2 a, Vec2 b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

double signed_area(Vec2 a, Vec2 b, Vec2 c);

// Barycentric coordinates of p with respect to triangle (a,b,c).
std::array<double, 3> barycentric(Vec2 a, Vec2 b, Vec2 c, Vec2 p);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
double segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

// Euclidean distance between two closed triangles (0 when they touch).
double triangle_distance(const std::array<Vec2, 3>& s, const std::array<Vec2, 3>& t);

}  // namespace sscmg
