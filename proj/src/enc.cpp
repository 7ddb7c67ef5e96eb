#include "nearshore/enc.hpp"

#include "nearshore/kernels.hpp"

#include <cmath>
#include <string>

namespace nearshore {

bool point_in_ring(double x, double y, const Ring& ring) {
    bool inside = false;
    const std::size_t n = ring.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = ring[i];
        const Vec2& b = ring[j];
        if ((a.y > y) != (b.y > y)) {
            const double t = (y - a.y) / (b.y - a.y);
            const double x_cross = a.x + t * (b.x - a.x);
            if (x < x_cross) {
                inside = !inside;
            }
        }
    }
    return inside;
}

bool point_in_polygon(double x, double y, const EncPolygon& poly) {
    // Even-odd over all rings: a point inside the outer ring and inside a
    // hole crosses an even number of edges in total.
    int crossings = point_in_ring(x, y, poly.outer) ? 1 : 0;
    for (const Ring& h : poly.holes) {
        if (point_in_ring(x, y, h)) {
            ++crossings;
        }
    }
    return (crossings % 2) == 1;
}

double ring_area(const Ring& ring) {
    double acc = 0.0;
    const std::size_t n = ring.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        acc += ring[j].x * ring[i].y - ring[i].x * ring[j].y;
    }
    return std::abs(acc) * 0.5;
}

Ring normalize_ring(Ring ring) {
    // Drop an explicit closing vertex, then consecutive duplicates.
    while (ring.size() > 1 && ring.front().x == ring.back().x && ring.front().y == ring.back().y) {
        ring.pop_back();
    }
    Ring out;
    for (const Vec2& v : ring) {
        if (out.empty() || out.back().x != v.x || out.back().y != v.y) {
            out.push_back(v);
        }
    }
    if (out.size() < 3) {
        throw ParseError("polygon ring has fewer than 3 distinct vertices (" +
                         std::to_string(out.size()) + " after normalization)");
    }
    return out;
}

BinaryMap rasterize_enc(const EncPolygonSet& enc, const GridSpec& g) {
    g.validate();
    return kernels::rasterize_polygons(enc, g);
}

}  // namespace nearshore
