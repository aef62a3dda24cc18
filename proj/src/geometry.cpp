#include "sscmg/geometry.hpp"

#include <algorithm>

namespace sscmg {

double signed_area(Vec2 a, Vec2 b, Vec2 c) {
    return 0.5 * cross(b - a, c - a);
}

std::array<double, 3> barycentric(Vec2 a, Vec2 b, Vec2 c, Vec2 p) {
    const double area = signed_area(a, b, c);
    const double la = signed_area(p, b, c) / area;
    const double lb = signed_area(a, p, c) / area;
    const double lc = signed_area(a, b, p) / area;
    return {la, lb, lc};
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

namespace {

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const double d1 = cross(b - a, c - a);
    const double d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c);
    const double d4 = cross(d - c, b - c);
    if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0))) return true;
    return false;
}

}  // namespace

double segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    if (segments_intersect(a, b, c, d)) return 0.0;
    return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                     point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

double triangle_distance(const std::array<Vec2, 3>& s, const std::array<Vec2, 3>& t) {
    // Mesh elements are interior-disjoint, so the minimum over edge pairs
    // covers touching and disjoint configurations alike.
    double best = segment_distance(s[0], s[1], t[0], t[1]);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            best = std::min(best, segment_distance(s[i], s[(i + 1) % 3], t[j], t[(j + 1) % 3]));
            if (best == 0.0) return 0.0;
        }
    }
    return best;
}

}  // namespace sscmg
