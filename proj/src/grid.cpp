#include "nearshore/grid.hpp"

#include <algorithm>
#include <cmath>

namespace nearshore {

void GridSpec::validate() const {
    if (!(cell_size > 0.0)) {
        throw ConfigError("grid cell_size must be positive");
    }
    if (n_cols < 1 || n_rows < 1) {
        throw ConfigError("grid dimensions must be at least 1x1");
    }
    if (!std::isfinite(origin_x) || !std::isfinite(origin_y)) {
        throw ConfigError("grid origin must be finite");
    }
}

bool GridSpec::operator==(const GridSpec& o) const {
    return origin_x == o.origin_x && origin_y == o.origin_y && cell_size == o.cell_size &&
           n_cols == o.n_cols && n_rows == o.n_rows;
}

std::optional<CellIndex> world_to_cell(double x, double y, const GridSpec& g) {
    const double fc = std::floor((x - g.origin_x) / g.cell_size);
    const double fr = std::floor((y - g.origin_y) / g.cell_size);
    if (fc < 0.0 || fr < 0.0 || fc >= static_cast<double>(g.n_cols) ||
        fr >= static_cast<double>(g.n_rows)) {
        return std::nullopt;
    }
    return CellIndex{static_cast<int>(fc), static_cast<int>(fr)};
}

std::optional<CellIndex> world_to_cell(const Point3& p_world, const GridSpec& g) {
    return world_to_cell(p_world.x, p_world.y, g);
}

std::size_t BinaryMap::count_static() const {
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(),
                                                  [](std::uint8_t c) { return c != 0; }));
}

}  // namespace nearshore
