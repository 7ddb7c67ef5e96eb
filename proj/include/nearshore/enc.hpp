#pragma once

#include "nearshore/grid.hpp"

#include <vector>

namespace nearshore {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Closed ring of world (x, y) vertices. Stored without the duplicate
/// closing vertex; >= 3 distinct vertices required.
using Ring = std::vector<Vec2>;

struct EncPolygon {
    Ring outer;
    std::vector<Ring> holes;
};

struct EncPolygonSet {
    std::vector<EncPolygon> polygons;
};

/// Even-odd test over a single ring.
bool point_in_ring(double x, double y, const Ring& ring);

/// Even-odd over outer + holes: holes subtract.
bool point_in_polygon(double x, double y, const EncPolygon& poly);

double ring_area(const Ring& ring);  // unsigned shoelace area

/// Drops a duplicated closing vertex and consecutive duplicates; throws
/// ParseError when fewer than 3 distinct vertices remain.
Ring normalize_ring(Ring ring);

/// Cell is land iff its center lies inside any polygon (even-odd rule).
BinaryMap rasterize_enc(const EncPolygonSet& enc, const GridSpec& g);

}  // namespace nearshore
